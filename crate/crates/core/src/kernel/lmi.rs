//! Log-barrier path following for small linear matrix inequalities:
//! maximize `c·y` subject to `F_b(y) = F_b0 + Σ_j y_j F_bj ≻ 0` for every block.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, Chol};

#[derive(Debug, Clone)]
pub struct LmiBlock {
    pub f0: CMat,
    pub fs: Vec<CMat>,
}

impl LmiBlock {
    fn at(&self, y: &[f64]) -> CMat {
        let mut f = self.f0.clone();
        for (fj, yj) in self.fs.iter().zip(y) {
            if *yj != 0.0 {
                f += fj * c(*yj, 0.0);
            }
        }
        f
    }
}

#[derive(Debug, Clone)]
pub struct LmiProblem {
    pub blocks: Vec<LmiBlock>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct LmiOptions {
    pub t0: f64,
    pub mu: f64,
    /// Stop once the barrier gap `p/t` is at most this.
    pub gap: f64,
    pub max_outer: usize,
    /// Stop as soon as the objective exceeds this value.
    pub stop_above: Option<f64>,
    /// Stop as soon as the upper bound falls below this value.
    pub stop_bound_below: Option<f64>,
}

impl Default for LmiOptions {
    fn default() -> Self {
        LmiOptions { t0: 1.0, mu: 10.0, gap: 1e-10, max_outer: 40, stop_above: None, stop_bound_below: None }
    }
}

#[derive(Debug, Clone)]
pub struct LmiResult {
    pub y: Vec<f64>,
    pub value: f64,
    /// `value + p/t`, an upper bound on the optimum at exact centering.
    pub bound: f64,
    pub outer: usize,
    pub newton: usize,
    pub converged: bool,
}

impl LmiProblem {
    fn order(&self) -> usize {
        self.blocks.iter().map(|b| b.f0.nrows()).sum()
    }

    fn factor(&self, y: &[f64]) -> Option<Vec<Chol>> {
        self.blocks.iter().map(|b| Chol::new(&b.at(y))).collect()
    }

    fn logdet(&self, y: &[f64]) -> Option<f64> {
        Some(self.factor(y)?.iter().map(Chol::logdet).sum())
    }

    pub fn is_strictly_feasible(&self, y: &[f64]) -> bool {
        self.factor(y).is_some()
    }

    pub fn solve(&self, y0: &[f64], opt: &LmiOptions) -> Result<LmiResult> {
        let d = self.c.len();
        let p = self.order() as f64;
        if !self.is_strictly_feasible(y0) {
            return Err(Error::NotStrictlyFeasible);
        }
        let mut y = y0.to_vec();
        let mut t = opt.t0;
        let mut newton = 0;
        let mut outer = 0;
        let mut converged = false;
        loop {
            newton += self.center(t, &mut y);
            outer += 1;
            let value = dot(&self.c, &y);
            let bound = value + p / t;
            if opt.stop_above.is_some_and(|s| value > s) || opt.stop_bound_below.is_some_and(|s| bound < s) {
                converged = true;
                break;
            }
            if p / t <= opt.gap {
                converged = true;
                break;
            }
            if outer >= opt.max_outer {
                break;
            }
            t *= opt.mu;
        }
        let value = dot(&self.c, &y);
        let _ = d;
        Ok(LmiResult { bound: value + p / t, value, y, outer, newton, converged })
    }

    /// Damped Newton on the barrier at fixed `t`; returns the step count.
    fn center(&self, t: f64, y: &mut Vec<f64>) -> usize {
        let d = y.len();
        let mut steps = 0;
        for _ in 0..200 {
            let Some(chols) = self.factor(y) else { break };
            let mut grad = DVector::from_iterator(d, self.c.iter().map(|cj| -t * cj));
            let mut hess = DMatrix::<f64>::zeros(d, d);
            for (blk, ch) in self.blocks.iter().zip(&chols) {
                let g: Vec<CMat> = blk.fs.iter().map(|fj| ch.solve(fj)).collect();
                for j in 0..d {
                    grad[j] -= g[j].trace().re;
                    for k in 0..=j {
                        let v = re_trace_prod(&g[j], &g[k]);
                        hess[(j, k)] += v;
                        if k != j {
                            hess[(k, j)] += v;
                        }
                    }
                }
            }
            let step = solve_spd(&hess, &grad);
            let dec = -grad.dot(&step);
            if !(dec.is_finite()) || dec / 2.0 <= 1e-11 {
                break;
            }
            let Some(ld0) = self.logdet(y) else { break };
            let slope = grad.dot(&step);
            let lin = dot(&self.c, step.as_slice());
            let mut s = 1.0;
            let mut moved = false;
            while s > 1e-14 {
                let trial: Vec<f64> = y.iter().zip(step.iter()).map(|(a, b)| a + s * b).collect();
                if let Some(ld) = self.logdet(&trial) {
                    // barrier difference, formed without the large linear term
                    let diff = -t * s * lin - (ld - ld0);
                    if diff <= 0.25 * s * slope {
                        *y = trial;
                        moved = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            steps += 1;
            if !moved {
                break;
            }
        }
        steps
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn re_trace_prod(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for k in 0..n {
            let x = a[(i, k)];
            let y = b[(k, i)];
            s += x.re * y.re - x.im * y.im;
        }
    }
    s
}

/// Newton direction `−H⁻¹ g`, regularizing when `H` is numerically singular.
fn solve_spd(h: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let d = h.nrows();
    let scale = (0..d).map(|i| h[(i, i)].abs()).fold(0.0f64, f64::max).max(1e-300);
    let mut reg = 0.0;
    for _ in 0..30 {
        let mut m = h.clone();
        for i in 0..d {
            m[(i, i)] += reg;
        }
        if let Some(ch) = Cholesky::new(m) {
            return -ch.solve(g);
        }
        reg = if reg == 0.0 { 1e-14 * scale } else { reg * 10.0 };
    }
    -g.clone()
}
