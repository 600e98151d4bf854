use super::{check_square, herm_eig, CMat};
use crate::error::{Error, Result};

/// Matrix exponential by scaling and squaring with a 20-term Taylor
/// polynomial, scaled so that ‖a‖_1 / 2^s ≤ 1/2.
pub fn expm(a: &CMat) -> Result<CMat> {
    check_square(a, "exponent")?;
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut s = 0i32;
    while norm1 / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let x = a.scale(1.0 / 2f64.powi(s));
    let mut term = CMat::identity(n, n);
    let mut sum = CMat::identity(n, n);
    for k in 1..=20 {
        term = &term * &x;
        term.scale_mut(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// Logarithm of a positive definite matrix through its eigendecomposition.
pub fn logm_pos(h: &CMat) -> Result<CMat> {
    let e = herm_eig(h)?;
    let scale = e.values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if e.min() <= 1e-14 * scale {
        return Err(Error::NotPositiveDefinite { min_eig: e.min() });
    }
    Ok(e.apply(f64::ln))
}
