use super::lmi::{LmiBlock, LmiOptions, LmiProblem};
use crate::algebra::{real_part_span, OperatorSubspace};
use crate::error::{Error, Result};
use crate::linalg::{c, eye, fro, herm_eig, hermitize, inner, re_part, CMat};
use crate::states::{evaluate, DensityState};

#[derive(Debug, Clone)]
pub struct LmiMaximum {
    /// Element of the subspace with `Re b ≤ g`.
    pub b: CMat,
    /// `ω(Re b)`.
    pub achieved: f64,
    /// `ω(g)`, the value a unique extension makes attainable.
    pub target: f64,
    /// Smallest eigenvalue of `g − Re b`.
    pub slack: f64,
    pub radius: f64,
    pub newton: usize,
}

/// Maximizes `ω(Re b)` over `b ∈ A` subject to `Re b ≤ g`.
///
/// `Re b` ranges over the real-part span of `A` in its canonical basis, and
/// each basis element has a fixed preimage in `A`, so the search has no
/// directions that leave `Re b` unchanged. A Euclidean ball keeps the
/// iterates bounded; it is enlarged when it binds before `gap` is reached.
pub fn lmi_maximize(a: &OperatorSubspace, g: &CMat, omega: &DensityState, gap: f64) -> Result<LmiMaximum> {
    if !a.unital {
        return Err(Error::NotStrictlyFeasible);
    }
    let n = a.ambient_dim();
    if g.nrows() != n || omega.dim() != n {
        return Err(Error::DimensionMismatch(format!("expected {n}x{n} data")));
    }
    if gap <= 0.0 {
        return Err(Error::InvalidInput("gap must be positive".into()));
    }
    let g = hermitize(g);
    let span = real_part_span(a);
    let m = span.basis.len();
    let obj: Vec<f64> = span.basis.iter().map(|h| evaluate(omega, h).re).collect();
    let target = evaluate(omega, &g).re;
    let lmin = herm_eig(&g)?.min();
    let start = eye(n) * c(lmin - 1.0, 0.0);
    let z0: Vec<f64> = span.basis.iter().map(|h| inner(h, &start).re).collect();
    let mut radius = 2.0 * fro(&g).max((lmin - 1.0).abs() * (n as f64).sqrt()) + 1.0;

    let mut best: Option<LmiMaximum> = None;
    for _attempt in 0..4 {
        let constraint = LmiBlock { f0: g.clone(), fs: span.basis.iter().map(|h| -h).collect() };
        let ball_f0 = eye(m + 1) * c(radius, 0.0);
        let ball_fs: Vec<CMat> = (0..m)
            .map(|k| {
                let mut e = CMat::zeros(m + 1, m + 1);
                e[(0, k + 1)] = c(1.0, 0.0);
                e[(k + 1, 0)] = c(1.0, 0.0);
                e
            })
            .collect();
        let prob = LmiProblem {
            blocks: vec![constraint, LmiBlock { f0: ball_f0, fs: ball_fs }],
            c: obj.clone(),
        };
        let opts = LmiOptions { gap: 1e-3 * gap, max_outer: 20, ..LmiOptions::default() };
        let sol = prob.solve(&z0, &opts)?;
        let mut b = CMat::zeros(n, n);
        let mut re_b = CMat::zeros(n, n);
        for ((pre, h), zk) in span.preimages.iter().zip(&span.basis).zip(&sol.y) {
            b += pre * c(*zk, 0.0);
            re_b += h * c(*zk, 0.0);
        }
        let slack = herm_eig(&(&g - re_part(&b)))?.min();
        let achieved = evaluate(omega, &re_b).re;
        let znorm = sol.y.iter().map(|x| x * x).sum::<f64>().sqrt();
        let result = LmiMaximum { b, achieved, target, slack, radius, newton: sol.newton };
        let done = achieved >= target - gap || znorm < 0.9 * radius;
        best = Some(match best {
            Some(prev) if prev.achieved >= result.achieved => prev,
            _ => result,
        });
        if done {
            break;
        }
        radius *= 4.0;
    }
    Ok(best.unwrap())
}
