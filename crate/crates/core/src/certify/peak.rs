use crate::algebra::{generate_cstar, member_distance, CStarAlgebra, OperatorSubspace};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, op_norm, CMat};
use crate::states::PureState;
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct PeakVerdict {
    pub peak: bool,
    /// Dimension of the eigenspace `E` of `a*a` at 1.
    pub eigenspace_dim: usize,
    /// `‖P_E ξ‖²`.
    pub overlap: f64,
    /// `max_b ‖P_E b P_E − ω(b) P_E‖` over a basis of `B`.
    pub compression_residual: f64,
}

/// Whether `ψ(a*a) < 1` for every state `ψ ≠ ω` on `B = C*(M)`.
///
/// States with `ψ(a*a) = 1` are exactly those supported on `E`, so the
/// condition is that `ξ ∈ E` and every state supported on `E` agrees with
/// `ω` on `B`. For `B = M_n` this says `E = Cξ`.
pub fn peak_state_check(m: &OperatorSubspace, omega: &PureState, a: &CMat, tol: &Tolerances) -> Result<PeakVerdict> {
    let b = generate_cstar(m);
    peak_state_check_in(m, &b, omega, a, tol)
}

pub fn peak_state_check_in(
    m: &OperatorSubspace,
    b: &CStarAlgebra,
    omega: &PureState,
    a: &CMat,
    tol: &Tolerances,
) -> Result<PeakVerdict> {
    super::excision::check_state(m, omega)?;
    crate::linalg::check_square(a, "a")?;
    let d = member_distance(a, m)?;
    if d > 1e-9 * (1.0 + crate::linalg::fro(a)) {
        return Err(Error::InvalidInput(format!("element is at distance {d:.3e} from the subspace")));
    }
    let na = op_norm(a);
    if (na - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("element has norm {na}, expected 1")));
    }
    Ok(peak_verdict(b, omega, a, tol))
}

pub(crate) fn peak_verdict(b: &CStarAlgebra, omega: &PureState, a: &CMat, tol: &Tolerances) -> PeakVerdict {
    let e = herm_eig(&(a.adjoint() * a)).unwrap();
    let v = e.columns_where(|x| x >= 1.0 - tol.eig_cluster);
    let pe = &v * v.adjoint();
    let xi = omega.xi();
    let overlap = (v.adjoint() * xi).norm_squared();
    let compression_residual = b
        .space
        .basis()
        .iter()
        .map(|x| op_norm(&(&pe * x * &pe - &pe * omega.eval(x))))
        .fold(0.0, f64::max);
    let peak = v.ncols() > 0 && overlap >= 1.0 - tol.eig_cluster && compression_residual <= tol.compression;
    PeakVerdict { peak, eigenspace_dim: v.ncols(), overlap, compression_residual }
}
