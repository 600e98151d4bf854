use rand::Rng;

use crate::algebra::{generate_cstar, CStarAlgebra, OperatorSubspace};
use crate::error::{Error, Result};
use crate::kernel::{width, SpectrahedronSlice, WidthReport};
use crate::states::{evaluate, exposed_pure_states, DensityState, PureState};
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct ExtensionReport {
    pub unique: bool,
    pub width: f64,
    pub witness_state: DensityState,
    /// Far end of the widest direction when the extension is not unique.
    pub second_state: Option<DensityState>,
    /// Largest deviation of the witness from the prescribed values.
    pub witness_residual: f64,
    pub detail: WidthReport,
}

/// States on `M_n` agreeing with `ω` on `M`, measured along a Hermitian
/// basis of `B = C*(M)`.
pub fn unique_extension_check(m: &OperatorSubspace, omega: &DensityState, tol: &Tolerances) -> Result<ExtensionReport> {
    let b = generate_cstar(m);
    unique_extension_check_in(m, &b, omega, tol)
}

/// As [`unique_extension_check`] with `B` supplied.
pub fn unique_extension_check_in(
    m: &OperatorSubspace,
    b: &CStarAlgebra,
    omega: &DensityState,
    tol: &Tolerances,
) -> Result<ExtensionReport> {
    extension_along(m, &b.hermitian_basis(), omega, tol)
}

/// Uniqueness along an arbitrary family of Hermitian directions.
pub fn extension_along(
    m: &OperatorSubspace,
    directions: &[crate::linalg::CMat],
    omega: &DensityState,
    tol: &Tolerances,
) -> Result<ExtensionReport> {
    if !m.unital {
        return Err(Error::InvalidInput("subspace is not unital".into()));
    }
    if omega.dim() != m.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "state on C^{}, subspace in M_{}",
            omega.dim(),
            m.ambient_dim()
        )));
    }
    let mut slice = SpectrahedronSlice::new(m.ambient_dim());
    for x in m.basis() {
        slice.add_complex(x, evaluate(omega, x))?;
    }
    let rep = width(&slice, directions, tol)?;
    let witness_residual = m
        .basis()
        .iter()
        .map(|x| (evaluate(&rep.point, x) - evaluate(omega, x)).norm())
        .fold(0.0, f64::max);
    let second_state = if rep.singleton || rep.per_direction.is_empty() {
        None
    } else {
        Some(rep.per_direction[rep.widest].argmax.clone())
    };
    Ok(ExtensionReport {
        unique: rep.singleton,
        width: rep.width,
        witness_state: rep.point.clone(),
        second_state,
        witness_residual,
        detail: rep,
    })
}

#[derive(Debug, Clone)]
pub struct PepFailure {
    pub state: PureState,
    pub width: f64,
}

#[derive(Debug, Clone)]
pub struct PepReport {
    pub directions: usize,
    pub exposed: usize,
    pub degenerate: usize,
    pub passes: usize,
    pub max_width: f64,
    pub failures: Vec<PepFailure>,
}

impl PepReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Unique extension of every exposed pure state found along random directions.
pub fn pep_scan<R: Rng + ?Sized>(m: &OperatorSubspace, directions: usize, rng: &mut R, tol: &Tolerances) -> Result<PepReport> {
    if !m.unital {
        return Err(Error::InvalidInput("subspace is not unital".into()));
    }
    let b = generate_cstar(m);
    let herm = b.hermitian_basis();
    let scan = exposed_pure_states(m, directions, rng, tol);
    let mut report = PepReport {
        directions,
        exposed: scan.states.len(),
        degenerate: scan.degenerate,
        passes: 0,
        max_width: 0.0,
        failures: vec![],
    };
    for w in &scan.states {
        let r = extension_along(m, &herm, &w.density(), tol)?;
        report.max_width = report.max_width.max(r.width);
        if r.unique {
            report.passes += 1;
        } else {
            report.failures.push(PepFailure { state: w.clone(), width: r.width });
        }
    }
    Ok(report)
}
