use rand::Rng;

use super::peak::{peak_verdict, PeakVerdict};
use crate::algebra::{generate_cstar, make_subspace, member_distance, CStarAlgebra, OperatorSubspace};
use crate::error::{Error, Result};
use crate::linalg::{c, eye, fro, herm_eig, op_norm, real_lstsq, trace, CMat, RMat, I};
use crate::states::{evaluate, PureState};
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct EMembership {
    pub member: bool,
    /// Orthonormal basis of the eigenspace `V` of `x*x` at 1.
    pub v: CMat,
    pub dim: usize,
    /// Largest distance of a compression `P_V a|_V` to the scalars.
    pub max_deviation: f64,
}

/// `x ∈ E`: every state with `ψ(x*x) = 1` restricts to the same state on
/// `A`, i.e. `A` compresses to scalars on `V`.
pub fn e_membership(a_sp: &OperatorSubspace, x: &CMat, tol: &Tolerances) -> Result<EMembership> {
    crate::linalg::check_square(x, "x")?;
    let d = member_distance(x, a_sp)?;
    if d > 1e-9 * (1.0 + fro(x)) {
        return Err(Error::InvalidInput(format!("element is at distance {d:.3e} from the algebra")));
    }
    let nx = op_norm(x);
    if (nx - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("element has norm {nx}, expected 1")));
    }
    let e = herm_eig(&(x.adjoint() * x))?;
    let v = e.columns_where(|l| l >= 1.0 - tol.eig_cluster);
    let k = v.ncols();
    let max_deviation = a_sp
        .basis()
        .iter()
        .map(|a| {
            let comp = v.adjoint() * a * &v;
            let z = trace(&comp) / c(k as f64, 0.0);
            op_norm(&(comp - eye(k) * z))
        })
        .fold(0.0, f64::max);
    Ok(EMembership { member: max_deviation <= tol.compression, v, dim: k, max_deviation })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Hypotheses {
    Verified,
    NotChecked(String),
}

impl Hypotheses {
    pub fn verified(&self) -> bool {
        matches!(self, Hypotheses::Verified)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalityCheck {
    /// `dim(A ∩ A*)`, computed exactly when `A` is an algebra.
    pub selfadjoint_dim: Option<usize>,
    /// Smallest `‖x*x − xx*‖` found over unit `x ∈ A ⊖ CI` by search.
    pub min_commutator: Option<f64>,
    /// No non-scalar normal element exists (exact) or was found (search).
    pub holds: bool,
}

/// Whether the only normal elements of `A` are scalars.
///
/// For a unital algebra this is exact: a normal `x ∈ A` has `x*` equal to a
/// polynomial in `x`, so normal elements lie in `A ∩ A*`, which is a
/// C*-algebra and is `CI` exactly when it has dimension 1. Other subspaces
/// get a Gauss–Newton search on `x ↦ x*x − xx*` over the unit sphere of
/// `A ⊖ CI`, which can only find counterexamples.
pub fn normality_check<R: Rng + ?Sized>(a_sp: &OperatorSubspace, restarts: usize, rng: &mut R) -> NormalityCheck {
    if a_sp.algebra_closed && a_sp.unital {
        let d = selfadjoint_part_dim(a_sp);
        return NormalityCheck { selfadjoint_dim: Some(d), min_commutator: None, holds: d <= 1 };
    }
    let best = commutator_search(a_sp, restarts, rng);
    NormalityCheck { selfadjoint_dim: None, min_commutator: Some(best), holds: best > 1e-6 }
}

fn selfadjoint_part_dim(a_sp: &OperatorSubspace) -> usize {
    let n = a_sp.ambient_dim();
    let d = a_sp.dim();
    let mut sys = CMat::zeros(n * n, 2 * d);
    for (j, b) in a_sp.basis().iter().enumerate() {
        let bs = b.adjoint();
        for (e, z) in b.iter().enumerate() {
            sys[(e, j)] = *z;
        }
        for (e, z) in bs.iter().enumerate() {
            sys[(e, d + j)] = -*z;
        }
    }
    crate::linalg::complex_null_space(&sys, 1e-9).len()
}

fn commutator_search<R: Rng + ?Sized>(a_sp: &OperatorSubspace, restarts: usize, rng: &mut R) -> f64 {
    let n = a_sp.ambient_dim();
    let id = eye(n) / c((n as f64).sqrt(), 0.0);
    let rest: Vec<CMat> = a_sp.basis().iter().map(|b| b - &id * crate::linalg::inner(&id, b)).collect();
    let Ok(sub) = make_subspace(&rest, false) else {
        return f64::INFINITY;
    };
    let basis = sub.basis();
    let d = basis.len();
    let comm = |x: &CMat| -> CMat { x.adjoint() * x - x * x.adjoint() };
    let build = |p: &[f64]| -> CMat {
        let mut x = CMat::zeros(n, n);
        for (j, b) in basis.iter().enumerate() {
            x += b * c(p[2 * j], p[2 * j + 1]);
        }
        x
    };
    let mut best = f64::INFINITY;
    for _ in 0..restarts.max(1) {
        let mut p = crate::rng::real_unit_vector(2 * d, rng);
        for _ in 0..200 {
            let x = build(&p);
            let r = comm(&x);
            if fro(&r) < 1e-13 {
                break;
            }
            let mut jac = RMat::zeros(2 * n * n + 1, 2 * d);
            for (j, b) in basis.iter().enumerate() {
                for (col, e) in [(2 * j, b.clone()), (2 * j + 1, b * I)] {
                    let dr = e.adjoint() * &x + x.adjoint() * &e - &e * x.adjoint() - &x * e.adjoint();
                    for (k, z) in dr.iter().enumerate() {
                        jac[(2 * k, col)] = z.re;
                        jac[(2 * k + 1, col)] = z.im;
                    }
                }
            }
            // steps stay tangent to the sphere; otherwise shrinking x wins
            let w = 1.0 + jac.norm();
            for (col, pj) in p.iter().enumerate() {
                jac[(2 * n * n, col)] = w * pj;
            }
            let mut rhs: Vec<f64> = r.iter().flat_map(|z| [-z.re, -z.im]).collect();
            rhs.push(0.0);
            let (step, _) = real_lstsq(&jac, &rhs, 1e-12);
            let current = fro(&r);
            let mut improved = false;
            let mut h = 1.0;
            for _ in 0..20 {
                let mut trial: Vec<f64> = p.iter().zip(&step).map(|(a, b)| a + h * b).collect();
                let nt = trial.iter().map(|x| x * x).sum::<f64>().sqrt();
                trial.iter_mut().for_each(|x| *x /= nt);
                if fro(&comm(&build(&trial))) < current {
                    p = trial;
                    improved = true;
                    break;
                }
                h *= 0.5;
            }
            if !improved {
                break;
            }
        }
        best = best.min(op_norm(&comm(&build(&p))));
    }
    best
}

/// Hypotheses of the `M_2` / `M_3` peaking result for `A`.
pub fn m23_hypotheses<R: Rng + ?Sized>(a_sp: &OperatorSubspace, rng: &mut R) -> (Hypotheses, Option<NormalityCheck>) {
    match a_sp.ambient_dim() {
        0..=2 => (Hypotheses::Verified, None),
        3 => {
            let nc = normality_check(a_sp, 20, rng);
            if nc.holds {
                (Hypotheses::Verified, Some(nc))
            } else {
                let msg = match nc.selfadjoint_dim {
                    Some(d) => format!("A ∩ A* has dimension {d}, so A contains non-scalar normal elements"),
                    None => format!("search found a near-normal non-scalar element ({:.3e})", nc.min_commutator.unwrap_or(0.0)),
                };
                (Hypotheses::NotChecked(msg), Some(nc))
            }
        }
        n => (Hypotheses::NotChecked(format!("ambient dimension {n} > 3")), None),
    }
}

#[derive(Debug, Clone)]
pub struct PeakFromE {
    pub omega: PureState,
    pub verdict: PeakVerdict,
    pub dim_v: usize,
    pub hypotheses: Hypotheses,
    /// Hypotheses verified but no peak.
    pub theorem_violation: bool,
}

pub fn peak_from_e<R: Rng + ?Sized>(a_sp: &OperatorSubspace, x: &CMat, rng: &mut R, tol: &Tolerances) -> Result<PeakFromE> {
    let (hyp, _) = m23_hypotheses(a_sp, rng);
    let b = generate_cstar(a_sp);
    peak_from_e_in(a_sp, &b, x, hyp, tol)
}

pub fn peak_from_e_in(
    a_sp: &OperatorSubspace,
    b: &CStarAlgebra,
    x: &CMat,
    hypotheses: Hypotheses,
    tol: &Tolerances,
) -> Result<PeakFromE> {
    let e = e_membership(a_sp, x, tol)?;
    if !e.member {
        return Err(Error::HypothesisFailed(format!(
            "element is not in E (compression deviation {:.3e})",
            e.max_deviation
        )));
    }
    let omega = PureState::new(e.v.column(0).into_owned())?;
    let verdict = peak_verdict(b, &omega, x, tol);
    let theorem_violation = hypotheses.verified() && !verdict.peak;
    Ok(PeakFromE { omega, verdict, dim_v: e.dim, hypotheses, theorem_violation })
}

#[derive(Debug, Clone)]
pub struct M23Report {
    pub trials: usize,
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    /// Trials where no element of `E` was found.
    pub exhausted: usize,
    pub max_eta: f64,
    pub hypotheses: Hypotheses,
    pub theorem_violations: usize,
}

/// For random `a ∈ A`, finds `x ∈ E` near `a/‖a‖`, takes the peak state `ω`
/// it produces and records `ω(a*a)/‖a‖²`.
pub fn m23_density_probe<R: Rng + ?Sized>(
    a_sp: &OperatorSubspace,
    trials: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<M23Report> {
    super::excision::check_algebra(a_sp)?;
    if a_sp.ambient_dim() > 3 {
        return Err(Error::InvalidInput("the probe needs ambient dimension at most 3".into()));
    }
    let (hypotheses, _) = m23_hypotheses(a_sp, rng);
    let b = generate_cstar(a_sp);
    let mut report = M23Report {
        trials,
        ratios: vec![],
        min_ratio: f64::INFINITY,
        exhausted: 0,
        max_eta: 0.0,
        hypotheses: hypotheses.clone(),
        theorem_violations: 0,
    };
    for _ in 0..trials {
        let a = a_sp.random_element(rng);
        let na = op_norm(&a);
        let x0 = &a / c(na, 0.0);
        let mut found = false;
        for k in 0..200 {
            let eta = 0.01 * k as f64;
            let y = if k == 0 {
                x0.clone()
            } else {
                let r = a_sp.random_element(rng);
                &x0 + &r * c(eta / op_norm(&r).max(1e-12), 0.0)
            };
            let x = a_sp.project(&(&y / c(op_norm(&y), 0.0)));
            let x = &x / c(op_norm(&x), 0.0);
            if !e_membership(a_sp, &x, tol)?.member {
                continue;
            }
            let p = peak_from_e_in(a_sp, &b, &x, hypotheses.clone(), tol)?;
            report.theorem_violations += p.theorem_violation as usize;
            let ratio = evaluate(&p.omega.density(), &(a.adjoint() * &a)).re / (na * na);
            report.ratios.push(ratio);
            report.min_ratio = report.min_ratio.min(ratio);
            report.max_eta = report.max_eta.max(eta);
            found = true;
            break;
        }
        report.exhausted += (!found) as usize;
    }
    Ok(report)
}
