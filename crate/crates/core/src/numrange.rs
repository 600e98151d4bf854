//! Support functions of joint numerical ranges, the 2×2 canonical form and
//! its closed-form maximizer, and free spectrahedra.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{c, eye, herm_eig, kron, op_norm, quad, re_part, CMat, CVec, ZERO};
use crate::states::PureState;
use crate::tol::Tolerances;

fn check_tuple(b: &[CMat]) -> Result<usize> {
    let first = b.first().ok_or_else(|| Error::InvalidInput("empty tuple".into()))?;
    let n = first.nrows();
    for (k, x) in b.iter().enumerate() {
        crate::linalg::check_square(x, &format!("tuple entry {k}"))?;
        if x.nrows() != n {
            return Err(Error::DimensionMismatch(format!("tuple entry {k} is not {n}x{n}")));
        }
    }
    Ok(n)
}

/// `Σ_k Re((u_{2k} − i u_{2k+1}) b_k)`.
fn combination(b: &[CMat], u: &[f64]) -> CMat {
    let n = b[0].nrows();
    let mut h = CMat::zeros(n, n);
    for (k, x) in b.iter().enumerate() {
        h += re_part(&(x * c(u[2 * k], -u[2 * k + 1])));
    }
    h
}

/// Largest value of `Re Σ conj(z_k) ψ(b_k)` over states, with `z_k = u_{2k} + i u_{2k+1}`,
/// and a vector state attaining it.
pub fn support_function(b: &[CMat], u: &[f64]) -> Result<(f64, PureState)> {
    check_tuple(b)?;
    if u.len() != 2 * b.len() {
        return Err(Error::DimensionMismatch(format!("direction has {} entries, expected {}", u.len(), 2 * b.len())));
    }
    let (val, v, _) = crate::linalg::top_eigvec(&combination(b, u));
    Ok((val, PureState::new(v)?))
}

#[derive(Debug, Clone, PartialEq)]
pub enum M2Canonical {
    /// `g = U (scale · [[t e^{iγ}, 1], [0, 0]] + shift · I) U*`.
    Form { t: f64, gamma: f64, scale: Complex64, shift: Complex64, unitary: CMat, residual: f64 },
    /// `g` is normal.
    Degenerate,
}

/// Schur triangularization followed by the affine normalization that sends
/// the off-diagonal entry to 1 and the lower eigenvalue to 0.
pub fn m2_canonical_form(g: &CMat) -> Result<M2Canonical> {
    if g.nrows() != 2 || g.ncols() != 2 {
        return Err(Error::DimensionMismatch("expected a 2x2 matrix".into()));
    }
    crate::linalg::check_square(g, "g")?;
    let tr = g[(0, 0)] + g[(1, 1)];
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    let disc = (tr * tr * 0.25 - det).sqrt();
    let (mut l1, mut l2) = (tr * 0.5 + disc, tr * 0.5 - disc);
    if (l2.re, l2.im) > (l1.re, l1.im) {
        std::mem::swap(&mut l1, &mut l2);
    }
    // eigenvector for l1 from whichever row of g − l1 I is larger
    let m = g - eye(2) * l1;
    let r0 = CVec::from_vec(vec![-m[(0, 1)], m[(0, 0)]]);
    let r1 = CVec::from_vec(vec![-m[(1, 1)], m[(1, 0)]]);
    let v = if r0.norm() >= r1.norm() { r0 } else { r1 };
    let v = if v.norm() < 1e-300 { CVec::from_vec(vec![c(1.0, 0.0), ZERO]) } else { v.clone() / c(v.norm(), 0.0) };
    let v = PureState::new(v)?.xi().clone();
    let w = CVec::from_vec(vec![-v[1].conj(), v[0].conj()]);
    let u = CMat::from_columns(&[v, w]);
    let t_mat = u.adjoint() * g * &u;
    let tau = t_mat[(0, 1)];
    if tau.norm() <= 1e-10 {
        return Ok(M2Canonical::Degenerate);
    }
    let z = (t_mat[(0, 0)] - t_mat[(1, 1)]) / tau;
    let gamma = if z.norm() == 0.0 { 0.0 } else { z.arg().rem_euclid(2.0 * PI) };
    let canon = CMat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => z,
        (0, 1) => c(1.0, 0.0),
        _ => ZERO,
    });
    let back = &u * (&canon * tau + eye(2) * t_mat[(1, 1)]) * u.adjoint();
    let residual = crate::linalg::fro(&(back - g));
    Ok(M2Canonical::Form { t: z.norm(), gamma, scale: tau, shift: t_mat[(1, 1)], unitary: u, residual })
}

/// `[[t e^{iγ}, 1], [0, 0]]`.
pub fn canonical_matrix(t: f64, gamma: f64) -> CMat {
    CMat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => Complex64::from_polar(t, gamma),
        (0, 1) => c(1.0, 0.0),
        _ => ZERO,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseMaximizer {
    pub alpha_star: f64,
    pub s_star: f64,
    pub value: f64,
    pub c: f64,
}

/// Maximizer of `f(α, s) = s² t cos(γ+β) + s √(1−s²) cos(α+β)` over
/// `[0, 2π) × [0, 1]`, i.e. of `Re(e^{iβ} ⟨g ξ, ξ⟩)` over unit vectors
/// `ξ = (s, e^{iα}√(1−s²))` for the canonical `g`.
pub fn m2_exposed_maximizer(t: f64, gamma: f64, beta: f64) -> Result<EllipseMaximizer> {
    if !(t >= 0.0) || !gamma.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidInput("need t ≥ 0 and finite angles".into()));
    }
    let cg = (gamma + beta).cos();
    let cc = 4.0 * (1.0 + t * t * cg * cg);
    let alpha_star = (-beta).rem_euclid(2.0 * PI);
    let root = ((cc - 4.0) / cc).max(0.0).sqrt();
    let (s_crit, v_crit) = if cg >= 0.0 {
        ((0.5 + 0.5 * root).sqrt(), ((cc - 4.0).max(0.0).sqrt() + cc.sqrt()) / 4.0)
    } else {
        ((0.5 - 0.5 * root).sqrt(), (-(cc - 4.0).max(0.0).sqrt() + cc.sqrt()) / 4.0)
    };
    let g = |s: f64| s * s * t * cg + s * (1.0 - s * s).max(0.0).sqrt();
    let mut best = (s_crit, v_crit);
    for s in [0.0, 1.0] {
        if g(s) > best.1 {
            best = (s, g(s));
        }
    }
    Ok(EllipseMaximizer { alpha_star, s_star: best.0, value: best.1, c: cc })
}

/// `f(α, s)` at `ρ = 1`.
pub fn ellipse_objective(t: f64, gamma: f64, beta: f64, alpha: f64, s: f64) -> f64 {
    s * s * t * (gamma + beta).cos() + s * (1.0 - s * s).max(0.0).sqrt() * (alpha + beta).cos()
}

#[derive(Debug, Clone)]
pub struct SphereFailure {
    pub direction: Vec<f64>,
    pub point: Vec<Complex64>,
    pub modulus: f64,
}

#[derive(Debug, Clone)]
pub struct SphereReport {
    /// `min eig(I − Σ b_k b_k*)`.
    pub contraction_margin: f64,
    pub exposed: usize,
    pub degenerate: usize,
    pub passes: usize,
    pub failures: Vec<SphereFailure>,
    /// Exposed points found, as `(direction, state)`.
    pub exposed_states: Vec<(Vec<f64>, PureState)>,
}

impl SphereReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    /// Sampling can only ever produce evidence, never a proof.
    pub fn verdict(&self) -> &'static str {
        if self.pass() {
            "sampled evidence: pass"
        } else {
            "sampled evidence: fail"
        }
    }
}

/// Sampled check that exposed points of the joint numerical range lie on
/// the unit sphere. A direction exposes a point when every `b_k` compresses
/// to a scalar on the top eigenspace of the combination.
pub fn jnr_sphere_check<R: Rng + ?Sized>(
    b: &[CMat],
    samples: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<SphereReport> {
    let n = check_tuple(b)?;
    let mut sum = CMat::zeros(n, n);
    for x in b {
        sum += x * x.adjoint();
    }
    let margin = herm_eig(&(eye(n) - sum))?.min();
    if margin < -1e-9 {
        return Err(Error::HypothesisFailed(format!(
            "sum of b_k b_k* exceeds I (min eigenvalue of I − Σ b_k b_k* is {margin:.3e})"
        )));
    }
    let mut report = SphereReport {
        contraction_margin: margin,
        exposed: 0,
        degenerate: 0,
        passes: 0,
        failures: vec![],
        exposed_states: vec![],
    };
    for _ in 0..samples {
        let u = crate::rng::real_unit_vector(2 * b.len(), rng);
        let h = combination(b, &u);
        let e = herm_eig(&h)?;
        let top = e.max();
        let v = e.columns_where(|x| x >= top - tol.eig_cluster);
        let xi = v.column(0).into_owned();
        let exposed = v.ncols() == 1
            || b.iter().all(|x| {
                let comp = v.adjoint() * x * &v;
                let z = quad(x, &xi);
                op_norm(&(comp - CMat::identity(v.ncols(), v.ncols()) * z)) <= tol.compression
            });
        if !exposed {
            report.degenerate += 1;
            continue;
        }
        report.exposed += 1;
        let point: Vec<Complex64> = b.iter().map(|x| quad(x, &xi)).collect();
        let modulus = point.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if modulus >= 1.0 - tol.sphere {
            report.passes += 1;
            report.exposed_states.push((u, PureState::new(xi)?));
        } else {
            report.failures.push(SphereFailure { direction: u, point, modulus });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct FreeSpectrahedron {
    a: Vec<CMat>,
}

impl FreeSpectrahedron {
    pub fn new(a: Vec<CMat>) -> Result<Self> {
        let d = check_tuple(&a)?;
        for (k, x) in a.iter().enumerate() {
            if crate::linalg::fro(&(x - x.adjoint())) > 1e-12 * (1.0 + crate::linalg::fro(x)) {
                return Err(Error::InvalidInput(format!("pencil coefficient {k} is not Hermitian")));
            }
        }
        if d == 0 {
            return Err(Error::InvalidInput("empty pencil coefficients".into()));
        }
        Ok(FreeSpectrahedron { a: a.iter().map(re_part).collect() })
    }

    pub fn block_size(&self) -> usize {
        self.a[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn coefficients(&self) -> &[CMat] {
        &self.a
    }

    /// Real coefficients give a set closed under entrywise transpose; this
    /// is only a sufficient condition.
    pub fn real_coefficients(&self) -> bool {
        self.a.iter().all(|x| x.iter().all(|z| z.im.abs() <= 1e-14))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// `min eig(I − Σ A_k ⊗ X_k)`.
    pub margin: f64,
}

pub fn free_spectrahedron_member(d: &FreeSpectrahedron, x: &[CMat], tol: &Tolerances) -> Result<Membership> {
    if x.len() != d.len() {
        return Err(Error::InvalidInput(format!("{} matrices for {} pencil coefficients", x.len(), d.len())));
    }
    let n = check_tuple(x)?;
    for (k, xk) in x.iter().enumerate() {
        if crate::linalg::fro(&(xk - xk.adjoint())) > 1e-10 * (1.0 + crate::linalg::fro(xk)) {
            return Err(Error::InvalidInput(format!("X_{k} is not Hermitian")));
        }
    }
    let dim = d.block_size() * n;
    let mut l = eye(dim);
    for (a, xk) in d.a.iter().zip(x) {
        l -= kron(a, &re_part(xk));
    }
    let margin = herm_eig(&l)?.min();
    Ok(Membership { member: margin >= -tol.spectrahedron, margin })
}

/// Unit vector `(s, e^{iα}√(1−s²))`.
pub fn ellipse_vector(alpha: f64, s: f64) -> CVec {
    CVec::from_vec(vec![c(s, 0.0), Complex64::from_polar((1.0 - s * s).max(0.0).sqrt(), alpha)])
}

