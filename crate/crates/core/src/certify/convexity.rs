use crate::algebra::{member_distance, OperatorSubspace};
use crate::error::{Error, Result};
use crate::linalg::{c, expm, herm_eig, op_norm, re_part, CMat};
use crate::states::{evaluate, DensityState};
use crate::tol::Tolerances;

/// `4(Re a)² + (a*a − aa*)`; positivity makes every `t ↦ ψ(e^{ta*}e^{ta})` convex.
pub fn convexity_operator(a: &CMat) -> CMat {
    let r = re_part(a);
    &r * &r * c(4.0, 0.0) + a.adjoint() * a - a * a.adjoint()
}

/// `ψ(e^{ta*} e^{ta})`.
pub fn exp_curve(a: &CMat, psi: &DensityState, t: f64) -> Result<f64> {
    let e = expm(&(a * c(t, 0.0)))?;
    Ok(evaluate(psi, &(e.adjoint() * e)).re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvexityStatus {
    Certified { min_eig: f64 },
    NotChecked { min_eig: f64 },
}

impl ConvexityStatus {
    pub fn certified(&self) -> bool {
        matches!(self, ConvexityStatus::Certified { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Convexity {
    /// The operator test holds, so the curve is convex for every state.
    CertifiedConvex { min_eig: f64 },
    /// All sampled second differences are nonnegative within tolerance.
    SampledConvex { min_eig: f64, min_second_difference: f64 },
    NonConvexWitness { min_eig: f64, t: f64, second_difference: f64 },
    /// Between the two sampled thresholds.
    Inconclusive { min_eig: f64, min_second_difference: f64 },
}

impl Convexity {
    pub fn non_convex(&self) -> bool {
        matches!(self, Convexity::NonConvexWitness { .. })
    }
}

/// `0, 0.05, …, 2`.
pub fn default_t_grid() -> Vec<f64> {
    (0..=40).map(|k| k as f64 * 0.05).collect()
}

pub fn a_convexity_check(
    a_sp: &OperatorSubspace,
    a: &CMat,
    psi: &DensityState,
    t_grid: &[f64],
    tol: &Tolerances,
) -> Result<Convexity> {
    let d = member_distance(a, a_sp)?;
    if d > 1e-9 * (1.0 + crate::linalg::fro(a)) {
        return Err(Error::InvalidInput(format!("element is at distance {d:.3e} from the algebra")));
    }
    if psi.dim() != a_sp.ambient_dim() {
        return Err(Error::DimensionMismatch("state and algebra live in different dimensions".into()));
    }
    let min_eig = herm_eig(&convexity_operator(a))?.min();
    if min_eig >= -tol.convex_certified * (1.0 + op_norm(a).powi(2)) {
        return Ok(Convexity::CertifiedConvex { min_eig });
    }
    if t_grid.len() < 3 || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("t grid must be increasing with at least 3 points".into()));
    }
    let f = t_grid.iter().map(|&t| exp_curve(a, psi, t)).collect::<Result<Vec<f64>>>()?;
    let scale = f.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut worst = (f64::INFINITY, 0.0);
    for i in 1..t_grid.len() - 1 {
        let (t0, t1, t2) = (t_grid[i - 1], t_grid[i], t_grid[i + 1]);
        let dd = 2.0 * ((f[i + 1] - f[i]) / (t2 - t1) - (f[i] - f[i - 1]) / (t1 - t0)) / (t2 - t0);
        if dd < worst.0 {
            worst = (dd, t1);
        }
    }
    let (dd, t) = worst;
    Ok(if dd >= -tol.convex_ok * scale {
        Convexity::SampledConvex { min_eig, min_second_difference: dd }
    } else if dd < -tol.convex_bad * scale {
        Convexity::NonConvexWitness { min_eig, t, second_difference: dd }
    } else {
        Convexity::Inconclusive { min_eig, min_second_difference: dd }
    })
}

#[derive(Debug, Clone)]
pub struct DerivSample {
    pub t: f64,
    pub f: f64,
    pub d1: f64,
    pub d1_fd: f64,
    pub d2: f64,
    pub d2_fd: f64,
    pub rel_err_d1: f64,
    pub rel_err_d2: f64,
    /// `|f(t) − (1 + 2 Re ψ(a) t)|` and `κ t²`, for `t ∈ [0, 1]`.
    pub bound: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct DerivReport {
    pub samples: Vec<DerivSample>,
    pub kappa: f64,
    pub max_rel_err: f64,
    pub derivatives_ok: bool,
    pub bound_ok: bool,
}

impl DerivReport {
    pub fn pass(&self) -> bool {
        self.derivatives_ok && self.bound_ok
    }
}

/// Closed forms `f' = 2ψ(e^{ta*} Re a e^{ta})` and
/// `f'' = ψ(e^{ta*}(4(Re a)² + a*a − aa*)e^{ta})` against central differences.
///
/// Errors are relative to `max(|closed form|, f(t))`: `f > 0` sets the scale
/// at which cancellation in the differences shows up.
pub fn expderiv_check(a: &CMat, psi: &DensityState, ts: &[f64], tol: &Tolerances) -> Result<DerivReport> {
    crate::linalg::check_square(a, "a")?;
    if psi.dim() != a.nrows() {
        return Err(Error::DimensionMismatch("state and element live in different dimensions".into()));
    }
    let h = tol.fd_step;
    let r = re_part(a);
    let q = convexity_operator(a);
    let kappa = 6.0 * op_norm(a).powi(2) * op_norm(&expm(&r)?).powi(2);
    let re_psi_a = evaluate(psi, a).re;
    let mut samples = Vec::with_capacity(ts.len());
    for &t in ts {
        let e = expm(&(a * c(t, 0.0)))?;
        let f = evaluate(psi, &(e.adjoint() * &e)).re;
        let d1 = 2.0 * evaluate(psi, &(e.adjoint() * &r * &e)).re;
        let d2 = evaluate(psi, &(e.adjoint() * &q * &e)).re;
        let (fp, fm) = (exp_curve(a, psi, t + h)?, exp_curve(a, psi, t - h)?);
        let d1_fd = (fp - fm) / (2.0 * h);
        let d2_fd = (fp - 2.0 * f + fm) / (h * h);
        let rel_err_d1 = (d1_fd - d1).abs() / d1.abs().max(f);
        let rel_err_d2 = (d2_fd - d2).abs() / d2.abs().max(f);
        let bound = (0.0..=1.0).contains(&t).then(|| ((f - (1.0 + 2.0 * re_psi_a * t)).abs(), kappa * t * t));
        samples.push(DerivSample { t, f, d1, d1_fd, d2, d2_fd, rel_err_d1, rel_err_d2, bound });
    }
    let max_rel_err = samples.iter().map(|s| s.rel_err_d1.max(s.rel_err_d2)).fold(0.0, f64::max);
    let bound_ok = samples.iter().filter_map(|s| s.bound).all(|(l, r)| l <= r + 1e-12);
    Ok(DerivReport { samples, kappa, max_rel_err, derivatives_ok: max_rel_err <= tol.fd_rel, bound_ok })
}
