use rand::Rng;

use super::peak::{peak_verdict, PeakVerdict};
use crate::algebra::{generate_cstar, CStarAlgebra, OperatorSubspace};
use crate::error::{Error, Result};
use crate::linalg::{c, complex_null_space, eye, op_norm, outer, real_lstsq, CMat, CVec, RMat, I};
use crate::states::{support_on, PureState};
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub enum Detection {
    Detected { a: CMat, verdict: PeakVerdict, method: &'static str },
    /// The search ran out; detectability is not refuted.
    Unknown { attempts: usize },
}

impl Detection {
    pub fn detected(&self) -> bool {
        matches!(self, Detection::Detected { .. })
    }

    pub fn witness(&self) -> Option<&CMat> {
        match self {
            Detection::Detected { a, .. } => Some(a),
            Detection::Unknown { .. } => None,
        }
    }
}

/// Looks for one `a ∈ M` peaking at `ω`; a constant sequence then detects it.
///
/// Exact candidates come first: `l + c(I − l)` when the support `l` lies in
/// `M`, and rank-one elements `u ξ*` of `M`, for which `a*a = ξξ*`. After
/// that, `budget` random starts are pushed by Gauss–Newton onto the set where
/// `ξ` is an eigenvector of `a*a`.
pub fn detectable_check<R: Rng + ?Sized>(
    m: &OperatorSubspace,
    omega: &PureState,
    budget: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<Detection> {
    let b = generate_cstar(m);
    detectable_check_in(m, &b, omega, budget, rng, tol)
}

pub fn detectable_check_in<R: Rng + ?Sized>(
    m: &OperatorSubspace,
    b: &CStarAlgebra,
    omega: &PureState,
    budget: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<Detection> {
    if !m.unital {
        return Err(Error::InvalidInput("subspace is not unital".into()));
    }
    super::excision::check_state(m, omega)?;
    let n = m.ambient_dim();
    let xi = omega.xi();
    let attempt = |cand: &CMat| -> Option<(CMat, PeakVerdict)> {
        let a = m.project(cand);
        let na = op_norm(&a);
        if na < 1e-12 {
            return None;
        }
        let a = a / c(na, 0.0);
        let v = peak_verdict(b, omega, &a, tol);
        v.peak.then_some((a, v))
    };

    let l = support_on(b, &omega.density());
    if m.contains(&l) {
        if let Some((a, verdict)) = attempt(&(&l + (eye(n) - &l) * c(0.5, 0.0))) {
            return Ok(Detection::Detected { a, verdict, method: "support" });
        }
    }

    // u ↦ (I − P_M)(u ξ*) is complex linear; its kernel gives u ξ* ∈ M
    let mut sys = CMat::zeros(n * n, n);
    for j in 0..n {
        let x = outer(&crate::linalg::basis_vec(n, j), xi);
        let r = &x - m.project(&x);
        for (e, z) in r.iter().enumerate() {
            sys[(e, j)] = *z;
        }
    }
    for u in complex_null_space(&sys, 1e-9) {
        if let Some((a, verdict)) = attempt(&outer(&u, xi)) {
            return Ok(Detection::Detected { a, verdict, method: "rank-one" });
        }
    }

    let target = m.project(&outer(xi, xi));
    for _ in 0..budget {
        let noise = m.random_element(rng) * c(rng.gen_range(0.0..1.0), 0.0);
        let start = &target + noise;
        if let Some(a) = gauss_newton(m, xi, start) {
            if let Some((a, verdict)) = attempt(&a) {
                return Ok(Detection::Detected { a, verdict, method: "search" });
            }
        }
    }
    Ok(Detection::Unknown { attempts: budget })
}

/// Drives `P_⊥ a*a ξ` to zero over `a ∈ M`, keeping `‖aξ‖ = 1`.
fn gauss_newton(m: &OperatorSubspace, xi: &CVec, start: CMat) -> Option<CMat> {
    let n = m.ambient_dim();
    let perp = eye(n) - outer(xi, xi);
    let basis = m.basis();
    let residual = |a: &CMat| -> CVec { &perp * (a.adjoint() * a * xi) };
    let mut a = start;
    for _ in 0..60 {
        let s = (&a * xi).norm();
        if s < 1e-12 {
            return None;
        }
        a /= c(s, 0.0);
        let r = residual(&a);
        if r.norm() < 1e-14 {
            return Some(a);
        }
        let mut jac = RMat::zeros(2 * n, 2 * basis.len());
        for (j, bj) in basis.iter().enumerate() {
            for (col, e) in [(2 * j, bj.clone()), (2 * j + 1, bj * I)] {
                let d = &perp * (e.adjoint() * &a * xi + a.adjoint() * &e * xi);
                for i in 0..n {
                    jac[(2 * i, col)] = d[i].re;
                    jac[(2 * i + 1, col)] = d[i].im;
                }
            }
        }
        let rhs: Vec<f64> = r.iter().flat_map(|z| [-z.re, -z.im]).collect();
        let (step, _) = real_lstsq(&jac, &rhs, 1e-12);
        for (j, bj) in basis.iter().enumerate() {
            a += bj * c(step[2 * j], step[2 * j + 1]);
        }
    }
    (residual(&a).norm() < 1e-10).then_some(a)
}
