use rand::Rng;

use super::excision::{excision_check_in, peak_support_check_in};
use super::extension::unique_extension_check_in;
use super::pinnacle::{pinnacle_construct_in, PinnacleCertificate};
use crate::algebra::{generate_cstar, CStarAlgebra, OperatorSubspace};
use crate::error::Result;
use crate::states::{DensityState, PureState};
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct ChainReport {
    /// (i) an excision exists.
    pub excision: bool,
    pub distance: f64,
    pub excision_residual: f64,
    /// (ii) an `A`-peak support exists.
    pub peak_support: bool,
    /// (iii) unique extension.
    pub unique: bool,
    pub width: f64,
    /// (iv) the pinnacle construction on the sampled `K`.
    pub pinnacle: std::result::Result<PinnacleCertificate, String>,
    /// Failed one-sided implications.
    pub violations: Vec<String>,
    /// (iii) holds while (i) fails.
    pub iii_without_i: bool,
}

pub fn chain_check<R: Rng + ?Sized>(
    a_sp: &OperatorSubspace,
    omega: &PureState,
    k: &[DensityState],
    alpha: f64,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<ChainReport> {
    let b = generate_cstar(a_sp);
    chain_check_in(a_sp, &b, omega, k, alpha, rng, tol)
}

pub fn chain_check_in<R: Rng + ?Sized>(
    a_sp: &OperatorSubspace,
    b: &CStarAlgebra,
    omega: &PureState,
    k: &[DensityState],
    alpha: f64,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<ChainReport> {
    let ex = excision_check_in(a_sp, b, omega, tol)?;
    let ps = peak_support_check_in(a_sp, b, omega, 8, rng, tol)?;
    let ext = unique_extension_check_in(a_sp, b, &omega.density(), tol)?;
    let pin = pinnacle_construct_in(a_sp, b, omega, k, alpha, Some(ext.unique), tol).map_err(|e| e.to_string());

    let mut violations = Vec::new();
    if ex.exists != ps.is_some() {
        violations.push(format!("(i) = {} but (ii) = {}", ex.exists, ps.is_some()));
    }
    if let Some(w) = &ps {
        if (w.omega_of_a - 1.0).abs() > 1e-10 || w.max_norm > 0.5 + 1e-10 {
            violations.push(format!("peak support witness fails: ω(a) = {}, max ‖ap‖ = {}", w.omega_of_a, w.max_norm));
        }
    }
    if ex.exists && ex.residual > tol.excision {
        violations.push(format!("excision residual {:.3e}", ex.residual));
    }
    if ex.exists && !ext.unique {
        violations.push(format!("(i) holds but extension is not unique (width {:.3e})", ext.width));
    }
    if ext.unique {
        if let Err(e) = &pin {
            violations.push(format!("(iii) holds but the pinnacle construction failed: {e}"));
        }
    }
    Ok(ChainReport {
        excision: ex.exists,
        distance: ex.distance,
        excision_residual: ex.residual,
        peak_support: ps.is_some(),
        unique: ext.unique,
        width: ext.width,
        pinnacle: pin,
        violations,
        iii_without_i: ext.unique && !ex.exists,
    })
}
