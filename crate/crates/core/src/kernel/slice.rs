//! Affine slices of the density-matrix body, their feasibility and widths.

use num_complex::Complex64;

use super::lmi::{LmiBlock, LmiOptions, LmiProblem};
use crate::error::{Error, Result};
use crate::linalg::{
    c, eye, fro, herm_coords, herm_eig, herm_from_coords, hermitize, real_lstsq, real_null_space,
    re_part, CMat, RMat, I,
};
use crate::states::DensityState;
use crate::tol::Tolerances;

/// `{ρ ⪰ 0 : tr(ρ H_i) = v_i}`; the trace constraint `(I, 1)` is always the
/// first entry.
#[derive(Debug, Clone)]
pub struct SpectrahedronSlice {
    n: usize,
    constraints: Vec<(CMat, f64)>,
}

impl SpectrahedronSlice {
    pub fn new(n: usize) -> Self {
        SpectrahedronSlice { n, constraints: vec![(eye(n), 1.0)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[(CMat, f64)] {
        &self.constraints
    }

    pub fn add(&mut self, h: &CMat, v: f64) -> Result<()> {
        if h.nrows() != self.n || h.ncols() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "constraint is {}x{}, slice lives in M_{}",
                h.nrows(),
                h.ncols(),
                self.n
            )));
        }
        if !v.is_finite() {
            return Err(Error::InvalidInput("non-finite constraint value".into()));
        }
        self.constraints.push((hermitize(h), v));
        Ok(())
    }

    /// `tr(ρ a) = z`, split into `tr(ρ Re a) = Re z` and `tr(ρ Re(ia)) = Re(iz)`.
    pub fn add_complex(&mut self, a: &CMat, z: Complex64) -> Result<()> {
        self.add(&re_part(a), z.re)?;
        self.add(&re_part(&(a * I)), (z * I).re)
    }

    /// Largest violation of the affine constraints at `rho`.
    pub fn residual(&self, rho: &CMat) -> f64 {
        self.constraints
            .iter()
            .map(|(h, v)| (crate::linalg::trace_prod(rho, h).re - v).abs())
            .fold(0.0, f64::max)
    }
}

/// The slice written over its minimal face: `ρ = V X V*` with
/// `X = X0 + Σ y_j N_j` and the face strictly feasible at `interior`.
#[derive(Debug, Clone)]
pub struct Face {
    pub v: CMat,
    pub x0: CMat,
    pub null: Vec<CMat>,
    pub interior: Vec<f64>,
    pub reductions: usize,
}

impl Face {
    pub fn rank(&self) -> usize {
        self.v.ncols()
    }

    pub fn dim(&self) -> usize {
        self.null.len()
    }

    pub fn lift(&self, y: &[f64]) -> CMat {
        let mut x = self.x0.clone();
        for (nj, yj) in self.null.iter().zip(y) {
            x += nj * c(*yj, 0.0);
        }
        &self.v * x * self.v.adjoint()
    }

    fn block(&self) -> LmiBlock {
        LmiBlock { f0: self.x0.clone(), fs: self.null.clone() }
    }
}

/// Facial reduction: repeatedly maximize the smallest eigenvalue over the
/// affine hull; a positive optimum gives an interior point, a negative one
/// proves infeasibility, and a zero optimum exposes a smaller face.
pub fn reduce(slice: &SpectrahedronSlice) -> Result<Face> {
    let n = slice.n;
    let mut v = eye(n);
    for reductions in 0..=n {
        let r = v.ncols();
        if r == 0 {
            return Err(Error::Infeasible { residual: 1.0 });
        }
        let rr = r * r;
        let mut a = RMat::zeros(slice.constraints.len(), rr);
        let mut rhs = Vec::with_capacity(slice.constraints.len());
        for (i, (h, val)) in slice.constraints.iter().enumerate() {
            let hr = v.adjoint() * h * &v;
            for (j, x) in herm_coords(&hr).into_iter().enumerate() {
                a[(i, j)] = x;
            }
            rhs.push(*val);
        }
        let scale = 1.0 + rhs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let (x0v, res) = real_lstsq(&a, &rhs, 1e-11);
        if res > 1e-7 * scale {
            return Err(Error::Infeasible { residual: res });
        }
        let x0 = herm_from_coords(&x0v, r);
        let nullm = real_null_space(&a, 1e-11);
        let null: Vec<CMat> = (0..nullm.ncols())
            .map(|j| herm_from_coords(nullm.column(j).as_slice(), r))
            .collect();
        if null.is_empty() {
            let lmin = herm_eig(&x0)?.min();
            if lmin < -1e-8 {
                return Err(Error::Infeasible { residual: -lmin });
            }
            return Ok(Face { v, x0, null, interior: vec![], reductions });
        }
        // phase one: maximize s subject to X0 + Σ y N − s I ⪰ 0
        let d = null.len();
        let mut fs = null.clone();
        fs.push(-eye(r));
        let prob = LmiProblem { blocks: vec![LmiBlock { f0: x0.clone(), fs }], c: unit_vec(d + 1, d) };
        let lmin = herm_eig(&x0)?.min();
        let mut y0 = vec![0.0; d + 1];
        y0[d] = lmin - 1.0;
        let opts = LmiOptions {
            gap: 1e-13,
            stop_above: Some(1e-6),
            stop_bound_below: Some(-1e-8),
            max_outer: 60,
            ..LmiOptions::default()
        };
        let sol = prob.solve(&y0, &opts)?;
        let s = sol.value;
        let y: Vec<f64> = sol.y[..d].to_vec();
        if s > 1e-9 {
            return Ok(Face { v, x0, null, interior: y, reductions });
        }
        if sol.bound < -1e-8 {
            return Err(Error::Infeasible { residual: -s });
        }
        let mut x = x0.clone();
        for (nj, yj) in null.iter().zip(&y) {
            x += nj * c(*yj, 0.0);
        }
        let e = herm_eig(&x)?;
        let keep = e.columns_where(|l| l > 1e-6);
        if keep.ncols() == r {
            return Ok(Face { v, x0, null, interior: y, reductions });
        }
        v = &v * keep;
    }
    Err(Error::Infeasible { residual: f64::NAN })
}

fn unit_vec(d: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[k] = 1.0;
    e
}

/// A density matrix in the slice, polished onto the affine constraints.
pub fn feasible_point(slice: &SpectrahedronSlice, tol: &Tolerances) -> Result<DensityState> {
    let face = reduce(slice)?;
    let rho = polish(slice, &face.lift(&face.interior));
    let res = slice.residual(&rho);
    let lmin = herm_eig(&rho)?.min();
    if res > tol.feasibility || lmin < -tol.feasibility {
        return Err(Error::Infeasible { residual: res.max(-lmin) });
    }
    Ok(DensityState::from_raw(rho))
}

/// Minimum-norm Hermitian correction restoring the affine constraints.
fn polish(slice: &SpectrahedronSlice, rho: &CMat) -> CMat {
    let n = slice.n;
    let mut a = RMat::zeros(slice.constraints.len(), n * n);
    let mut rhs = Vec::new();
    for (i, (h, val)) in slice.constraints.iter().enumerate() {
        for (j, x) in herm_coords(h).into_iter().enumerate() {
            a[(i, j)] = x;
        }
        rhs.push(val - crate::linalg::trace_prod(rho, h).re);
    }
    let (dx, _) = real_lstsq(&a, &rhs, 1e-11);
    hermitize(&(rho + herm_from_coords(&dx, n)))
}

#[derive(Debug, Clone)]
pub struct DirectionWidth {
    pub max: f64,
    pub min: f64,
    pub argmax: DensityState,
    pub argmin: DensityState,
}

impl DirectionWidth {
    pub fn width(&self) -> f64 {
        (self.max - self.min).max(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct WidthReport {
    pub width: f64,
    pub per_direction: Vec<DirectionWidth>,
    /// Index of the direction attaining `width`.
    pub widest: usize,
    pub singleton: bool,
    pub face_rank: usize,
    pub face_dim: usize,
    pub iterations: usize,
    pub converged: bool,
    /// A point of the slice.
    pub point: DensityState,
}

/// Max − min of `tr(ρH)` over the slice for each direction.
pub fn width(slice: &SpectrahedronSlice, directions: &[CMat], tol: &Tolerances) -> Result<WidthReport> {
    let face = reduce(slice)?;
    width_on_face(slice, &face, directions, tol)
}

pub fn width_on_face(
    slice: &SpectrahedronSlice,
    face: &Face,
    directions: &[CMat],
    tol: &Tolerances,
) -> Result<WidthReport> {
    let center = DensityState::from_raw(polish(slice, &face.lift(&face.interior)));
    let mut per = Vec::with_capacity(directions.len());
    let mut iterations = 0;
    let mut converged = true;
    for h in directions {
        let hr = face.v.adjoint() * hermitize(h) * &face.v;
        let hc = herm_coords(&hr);
        let cvec: Vec<f64> = face
            .null
            .iter()
            .map(|nj| herm_coords(nj).iter().zip(&hc).map(|(a, b)| a * b).sum())
            .collect();
        let cn = cvec.iter().map(|x| x * x).sum::<f64>().sqrt();
        if face.null.is_empty() || cn <= 1e-12 * (1.0 + fro(h)) {
            let val = crate::linalg::trace_prod(center.rho(), h).re;
            per.push(DirectionWidth { max: val, min: val, argmax: center.clone(), argmin: center.clone() });
            continue;
        }
        let mut ends = Vec::with_capacity(2);
        for sign in [1.0, -1.0] {
            let prob = LmiProblem {
                blocks: vec![face.block()],
                c: cvec.iter().map(|x| sign * x).collect(),
            };
            let opts = LmiOptions { gap: 1e-11 * (1.0 + cn), ..LmiOptions::default() };
            let sol = prob.solve(&face.interior, &opts)?;
            iterations += sol.newton;
            converged &= sol.converged;
            let rho = polish(slice, &face.lift(&sol.y));
            let val = crate::linalg::trace_prod(&rho, h).re;
            ends.push((val, DensityState::from_raw(rho)));
        }
        let (min, argmin) = ends.pop().unwrap();
        let (max, argmax) = ends.pop().unwrap();
        per.push(DirectionWidth { max, min, argmax, argmin });
    }
    let (widest, width) = per
        .iter()
        .enumerate()
        .map(|(k, d)| (k, d.width()))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok(WidthReport {
        width,
        per_direction: per,
        widest,
        singleton: width <= tol.width,
        face_rank: face.rank(),
        face_dim: face.dim(),
        iterations,
        converged,
        point: center,
    })
}
