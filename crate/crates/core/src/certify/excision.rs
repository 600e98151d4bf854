use rand::Rng;

use crate::algebra::{generate_cstar, member_distance, CStarAlgebra, OperatorSubspace};
use crate::error::{Error, Result};
use crate::linalg::{c, eye, op_norm, orthonormal_columns, CMat, CVec};
use crate::states::{support_on, PureState};
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct ExcisionReport {
    pub exists: bool,
    /// Frobenius distance from `l_ω` to `A`.
    pub distance: f64,
    pub excising_element: Option<CMat>,
    /// `max_b ‖e(b − ω(b))e‖` over a basis of `B`, when `e` exists.
    pub residual: f64,
    /// `ω(e)`.
    pub omega_of_e: f64,
    pub support: CMat,
}

pub(crate) fn check_algebra(a: &OperatorSubspace) -> Result<()> {
    if !a.unital || !a.algebra_closed {
        return Err(Error::InvalidInput("expected a unital algebra".into()));
    }
    Ok(())
}

pub(crate) fn check_state(a: &OperatorSubspace, omega: &PureState) -> Result<()> {
    if omega.dim() != a.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "state on C^{}, subspace in M_{}",
            omega.dim(),
            a.ambient_dim()
        )));
    }
    Ok(())
}

/// In finite dimension an excising net can be taken constant, equal to the
/// support `l_ω`, and it lies in `A` or nothing does.
pub fn excision_check(a: &OperatorSubspace, omega: &PureState, tol: &Tolerances) -> Result<ExcisionReport> {
    let b = generate_cstar(a);
    excision_check_in(a, &b, omega, tol)
}

pub fn excision_check_in(a: &OperatorSubspace, b: &CStarAlgebra, omega: &PureState, tol: &Tolerances) -> Result<ExcisionReport> {
    check_algebra(a)?;
    check_state(a, omega)?;
    let p = support_on(b, &omega.density());
    let distance = member_distance(&p, a)?;
    let exists = distance <= tol.excision;
    let (residual, excising_element) = if exists {
        let r = b
            .space
            .basis()
            .iter()
            .map(|x| op_norm(&(&p * (x - eye(p.nrows()) * omega.eval(x)) * &p)))
            .fold(0.0, f64::max);
        (r, Some(p.clone()))
    } else {
        (f64::NAN, None)
    };
    Ok(ExcisionReport { exists, distance, excising_element, residual, omega_of_e: omega.eval(&p).re, support: p })
}

#[derive(Debug, Clone)]
pub struct PeakSupportWitness {
    pub a: CMat,
    pub omega_of_a: f64,
    /// Largest `‖a p‖` over the sampled projections with `ω(p) = 0`.
    pub max_norm: f64,
    pub projections_tested: usize,
}

/// `a = (I + l_ω)/2` when `l_ω ∈ A`, checked against random projections
/// orthogonal to the support. `None` when `l_ω ∉ A`.
pub fn peak_support_check<R: Rng + ?Sized>(
    a: &OperatorSubspace,
    omega: &PureState,
    samples: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<Option<PeakSupportWitness>> {
    let b = generate_cstar(a);
    peak_support_check_in(a, &b, omega, samples, rng, tol)
}

pub fn peak_support_check_in<R: Rng + ?Sized>(
    a: &OperatorSubspace,
    b: &CStarAlgebra,
    omega: &PureState,
    samples: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<Option<PeakSupportWitness>> {
    let ex = excision_check_in(a, b, omega, tol)?;
    if !ex.exists {
        return Ok(None);
    }
    let n = a.ambient_dim();
    let l = ex.support;
    let w = (eye(n) + &l) * c(0.5, 0.0);
    let comp = eye(n) - &l;
    let cols: Vec<CVec> = (0..n).map(|j| comp.column(j).into_owned()).collect();
    let q = orthonormal_columns(&cols, 1e-9);
    let r = q.ncols();
    let mut max_norm: f64 = 0.0;
    let mut tested = 0;
    if r > 0 {
        for _ in 0..samples.max(1) {
            let u = crate::rng::unitary(r, rng);
            let rot = &q * u;
            let picked: Vec<CVec> = (0..r).filter(|_| rng.gen_bool(0.5)).map(|j| rot.column(j).into_owned()).collect();
            if picked.is_empty() {
                continue;
            }
            let v = CMat::from_columns(&picked);
            let p = &v * v.adjoint();
            max_norm = max_norm.max(op_norm(&(&w * p)));
            tested += 1;
        }
        // the full complement is always in the family
        max_norm = max_norm.max(op_norm(&(&w * &comp)));
        tested += 1;
    }
    Ok(Some(PeakSupportWitness { omega_of_a: omega.eval(&w).re, a: w, max_norm, projections_tested: tested }))
}
