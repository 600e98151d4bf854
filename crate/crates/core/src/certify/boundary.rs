use crate::algebra::{generate_cstar, CStarAlgebra, OperatorSubspace};
use crate::error::Result;
use crate::kernel::{choi_directions, choi_slice, width};
use crate::linalg::{orthonormal_columns, CMat, CVec};
use crate::states::PureState;
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct BoundaryVerdict {
    pub boundary: bool,
    /// Width of the Choi slice along directions from `B`.
    pub width: f64,
    /// Dimension of the GNS space `[Bξ]`.
    pub gns_dim: usize,
    pub face_dim: usize,
}

/// Whether the GNS representation of `ω` on `B`, restricted to `M`, has a
/// unique unital completely positive extension to `B`.
///
/// The GNS space is `K = [Bξ]` with `π(b) = W* b W` for an isometry `W`
/// onto `K`.
pub fn boundary_rep_check(m: &OperatorSubspace, omega: &PureState, tol: &Tolerances) -> Result<BoundaryVerdict> {
    let b = generate_cstar(m);
    boundary_rep_check_in(m, &b, omega, tol)
}

pub fn boundary_rep_check_in(
    m: &OperatorSubspace,
    b: &CStarAlgebra,
    omega: &PureState,
    tol: &Tolerances,
) -> Result<BoundaryVerdict> {
    super::excision::check_state(m, omega)?;
    let cols: Vec<CVec> = b.space.basis().iter().map(|x| x * omega.xi()).collect();
    let w = orthonormal_columns(&cols, 1e-9);
    let k = w.ncols();
    let pi = |x: &CMat| -> CMat { w.adjoint() * x * &w };
    let slice = choi_slice(m, &pi, k)?;
    let rep = width(&slice, &choi_directions(b.space.basis(), k), tol)?;
    Ok(BoundaryVerdict { boundary: rep.singleton, width: rep.width, gns_dim: k, face_dim: rep.face_dim })
}
