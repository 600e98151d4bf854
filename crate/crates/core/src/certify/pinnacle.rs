use crate::algebra::{generate_cstar, CStarAlgebra, OperatorSubspace};
use crate::error::{Error, Result};
use crate::kernel::lmi_maximize;
use crate::linalg::{c, expm, eye, logm_pos, op_norm, re_part, CMat};
use crate::states::{evaluate, support_on, DensityState, PureState};
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct PinnacleCertificate {
    pub a: CMat,
    /// The Hahn–Banach element, `a ∝ e^{δb}`.
    pub b: CMat,
    pub alpha: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub kappa: f64,
    /// `max_K ψ(l_ω)`.
    pub gamma: f64,
    /// `ω(a*a)`.
    pub omega_value: f64,
    pub norm: f64,
    /// `max_K ψ(a*a)`.
    pub max_k: f64,
    pub one_minus_max_k: f64,
    /// `1 + α − ‖a‖`.
    pub norm_slack: f64,
    /// Whether `ω|_A` was found to extend uniquely; without it the
    /// Hahn–Banach step may fall short.
    pub unique_extension: bool,
    pub lmi_achieved: f64,
    pub lmi_target: f64,
    pub k_size: usize,
}

/// Largest `2^{-j}`, `0 ≤ j ≤ max_exp`, accepted by `ok`.
pub(crate) fn largest_dyadic(max_exp: i32, ok: impl Fn(f64) -> bool) -> Option<f64> {
    (0..=max_exp).map(|j| 2f64.powi(-j)).find(|&x| ok(x))
}

pub(crate) fn check_k(n: usize, k: &[DensityState]) -> Result<()> {
    if let Some(i) = k.iter().position(|s| s.dim() != n) {
        return Err(Error::DimensionMismatch(format!("K[{i}] is a state on C^{}, expected C^{n}", k[i].dim())));
    }
    Ok(())
}

/// `a ∈ A` with `ω(a*a) = 1`, `‖a‖ ≤ 1 + α` and `ψ(a*a) < 1` on `K`.
///
/// `f = l_ω`, `g = log(f + ε)`, `b` from the Hahn–Banach program for `g`,
/// then `a = e^{δb}` normalized. The slack factor multiplies each right-hand
/// side in log form, so every inequality is strict with room to spare.
pub fn pinnacle_construct(
    a_sp: &OperatorSubspace,
    omega: &PureState,
    k: &[DensityState],
    alpha: f64,
    tol: &Tolerances,
) -> Result<PinnacleCertificate> {
    let b = generate_cstar(a_sp);
    pinnacle_construct_in(a_sp, &b, omega, k, alpha, None, tol)
}

/// As [`pinnacle_construct`]; `unique` skips the uniqueness probe when
/// already known.
pub fn pinnacle_construct_in(
    a_sp: &OperatorSubspace,
    bb: &CStarAlgebra,
    omega: &PureState,
    k: &[DensityState],
    alpha: f64,
    unique: Option<bool>,
    tol: &Tolerances,
) -> Result<PinnacleCertificate> {
    super::excision::check_algebra(a_sp)?;
    super::excision::check_state(a_sp, omega)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    let n = a_sp.ambient_dim();
    check_k(n, k)?;
    let w = omega.density();
    let unique_extension = match unique {
        Some(u) => u,
        None => super::extension::unique_extension_check_in(a_sp, bb, &w, tol)?.unique,
    };
    if k.is_empty() {
        let id = eye(n);
        return Ok(PinnacleCertificate {
            a: id.clone(),
            b: CMat::zeros(n, n),
            alpha,
            epsilon: 0.0,
            delta: 0.0,
            kappa: 0.0,
            gamma: 0.0,
            omega_value: 1.0,
            norm: 1.0,
            max_k: 0.0,
            one_minus_max_k: 1.0,
            norm_slack: alpha,
            unique_extension,
            lmi_achieved: 0.0,
            lmi_target: 0.0,
            k_size: 0,
        });
    }
    let f = support_on(bb, &w);
    let gamma = k.iter().map(|s| evaluate(s, &f).re).fold(f64::NEG_INFINITY, f64::max);
    if gamma >= 1.0 - 1e-12 {
        return Err(Error::InvalidInput(format!("a state in K is not distinct from ω (ψ(l_ω) = {gamma})")));
    }
    let gamma = gamma.max(0.0);
    let s = tol.dyadic_slack;
    let epsilon = largest_dyadic(tol.dyadic_max_exp, |e| {
        e < s * (1.0 - gamma)
            && 2.0 * e.ln_1p() < s * alpha.ln_1p()
            && 3.0 * e < s * (-(gamma + e).ln())
    })
    .ok_or_else(|| Error::MarginViolation("no admissible ε".into()))?;

    let g = logm_pos(&(&f + eye(n) * c(epsilon, 0.0)))?;
    let lmi = lmi_maximize(a_sp, &g, &w, epsilon)?;
    if lmi.achieved < lmi.target - epsilon {
        return Err(Error::SolverShortfall { achieved: lmi.achieved, target: lmi.target - epsilon });
    }
    let b = lmi.b.clone();
    let kappa = 6.0 * op_norm(&b).powi(2) * op_norm(&expm(&re_part(&b))?).powi(2);
    let log_gap = -(gamma + epsilon).ln();
    let delta = largest_dyadic(tol.dyadic_max_exp, |d| {
        3.0 * epsilon * d < 1.0
            && d * epsilon.ln_1p() - 0.5 * (1.0 - 3.0 * epsilon * d).ln() < s * 2.0 * epsilon.ln_1p()
            && kappa * d < s * epsilon
            && kappa * d < s * log_gap
    })
    .ok_or_else(|| Error::MarginViolation(format!("no admissible δ (κ = {kappa:.3e})")))?;

    let a0 = expm(&(&b * c(delta, 0.0)))?;
    let scale = evaluate(&w, &(a0.adjoint() * &a0)).re;
    let a = a0 / c(scale.sqrt(), 0.0);
    let aa = a.adjoint() * &a;
    let omega_value = evaluate(&w, &aa).re;
    let norm = op_norm(&a);
    let max_k = k.iter().map(|s| evaluate(s, &aa).re).fold(f64::NEG_INFINITY, f64::max);
    let cert = PinnacleCertificate {
        a,
        b,
        alpha,
        epsilon,
        delta,
        kappa,
        gamma,
        omega_value,
        norm,
        max_k,
        one_minus_max_k: 1.0 - max_k,
        norm_slack: 1.0 + alpha - norm,
        unique_extension,
        lmi_achieved: lmi.achieved,
        lmi_target: lmi.target,
        k_size: k.len(),
    };
    if (omega_value - 1.0).abs() > 1e-9 || cert.norm_slack < 0.0 || cert.one_minus_max_k <= 0.0 {
        return Err(Error::MarginViolation(format!(
            "ω(a*a) = {omega_value}, 1+α−‖a‖ = {:.3e}, 1 − max_K ψ(a*a) = {:.3e}",
            cert.norm_slack, cert.one_minus_max_k
        )));
    }
    Ok(cert)
}
