use num_complex::Complex64;
use rand::Rng;

use super::extension::extension_along;
use crate::algebra::{generate_algebra, make_subspace, product_system, real_part_span};
use crate::error::{Error, Result};
use crate::linalg::{eye, CMat};
use crate::numrange::{jnr_sphere_check, SphereReport};
use crate::states::{evaluate, DensityState, PureState};
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct WarvPoint {
    pub state: PureState,
    pub values: Vec<Complex64>,
    pub unique: bool,
    pub width: f64,
    /// `max |ψ(b_k d) − ω(b_k)ψ(d)|`.
    pub left_residual: f64,
    /// `max |ψ(b_k d b_j*) − ω(b_k)ψ(d)ω(b_j)*|`.
    pub two_sided_residual: f64,
}

#[derive(Debug, Clone)]
pub struct WarvReport {
    pub sphere: SphereReport,
    pub points: Vec<WarvPoint>,
    pub d_dim: usize,
    pub max_residual: f64,
    pub max_width: f64,
}

impl WarvReport {
    pub fn pass(&self, tol: &Tolerances) -> bool {
        self.points.iter().all(|p| p.unique) && self.max_residual <= tol.multiplicative
    }
}

fn residuals(psi: &DensityState, b: &[CMat], w: &[Complex64], d_basis: &[CMat]) -> (f64, f64) {
    let (mut left, mut two) = (0.0f64, 0.0f64);
    for d in d_basis {
        let pd = evaluate(psi, d);
        for (bk, wk) in b.iter().zip(w) {
            left = left.max((evaluate(psi, &(bk * d)) - wk * pd).norm());
            for (bj, wj) in b.iter().zip(w) {
                let lhs = evaluate(psi, &(bk * d * bj.adjoint()));
                two = two.max((lhs - wk * pd * wj.conj()).norm());
            }
        }
    }
    (left, two)
}

/// For exposed points of the joint numerical range on the unit sphere: the
/// state on `M = span{I, b_k}` extends uniquely to the operator system `D`
/// spanned by `a c*` over the algebra `A` generated by `M`, and every
/// extension is multiplicative against the `b_k`.
pub fn warv_verify<R: Rng + ?Sized>(b: &[CMat], samples: usize, rng: &mut R, tol: &Tolerances) -> Result<WarvReport> {
    let sphere = jnr_sphere_check(b, samples, rng, tol)?;
    if !sphere.pass() {
        let f = &sphere.failures[0];
        return Err(Error::HypothesisFailed(format!(
            "exposed point of modulus {:.6} in direction {:?}",
            f.modulus, f.direction
        )));
    }
    let n = b[0].nrows();
    let mut gens = vec![eye(n)];
    gens.extend(b.iter().cloned());
    let m = make_subspace(&gens, true)?;
    let a = generate_algebra(b, n)?;
    let d = product_system(&a);
    let dirs = real_part_span(&d).basis;
    let mut seen: Vec<PureState> = Vec::new();
    let mut points = Vec::new();
    for (_, state) in &sphere.exposed_states {
        if seen.iter().any(|s| s.same_ray(state, tol.dedup)) {
            continue;
        }
        seen.push(state.clone());
        let values: Vec<Complex64> = b.iter().map(|x| state.eval(x)).collect();
        let ext = extension_along(&m, &dirs, &state.density(), tol)?;
        let mut witnesses = vec![ext.witness_state.clone()];
        for dw in &ext.detail.per_direction {
            witnesses.push(dw.argmax.clone());
            witnesses.push(dw.argmin.clone());
        }
        let (mut left, mut two) = (0.0f64, 0.0f64);
        for psi in &witnesses {
            let (l, t) = residuals(psi, b, &values, d.basis());
            left = left.max(l);
            two = two.max(t);
        }
        points.push(WarvPoint {
            state: state.clone(),
            values,
            unique: ext.unique,
            width: ext.width,
            left_residual: left,
            two_sided_residual: two,
        });
    }
    let max_residual = points.iter().map(|p| p.left_residual.max(p.two_sided_residual)).fold(0.0, f64::max);
    let max_width = points.iter().map(|p| p.width).fold(0.0, f64::max);
    Ok(WarvReport { sphere, points, d_dim: d.dim(), max_residual, max_width })
}
