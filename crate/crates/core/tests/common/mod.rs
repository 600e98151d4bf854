#![allow(dead_code)]

use peakstate::kernel::SpectrahedronSlice;
use peakstate::linalg::*;
use peakstate::rng::{real_unit_vector, Gen};
use rand::Rng;

/// Exact description of an affine slice of the qubit state space in Bloch
/// coordinates `ρ = (I + x·σ)/2`: the slice is the ball `|x| ≤ 1` cut by the
/// affine set `x0 + span(null)`.
pub struct BlochSlice {
    pub x0: [f64; 3],
    pub null: Vec<[f64; 3]>,
    pub feasible: bool,
    pub radius: f64,
}

pub fn pauli() -> [CMat; 3] {
    [
        from_real(&[&[0.0, 1.0], &[1.0, 0.0]]),
        CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(0.0, 1.0),
            _ => ZERO,
        }),
        diag_real(&[1.0, -1.0]),
    ]
}

/// `(h0, h)` with `H = h0 I + h·σ`.
pub fn bloch_coords(h: &CMat) -> (f64, [f64; 3]) {
    let s = pauli();
    let h0 = trace(h).re / 2.0;
    let v = [0, 1, 2].map(|k| trace_prod(h, &s[k]).re / 2.0);
    (h0, v)
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sub(a: &[f64; 3], b: &[f64; 3], s: f64) -> [f64; 3] {
    [a[0] - s * b[0], a[1] - s * b[1], a[2] - s * b[2]]
}

/// Gram–Schmidt on the constraint normals, then the minimum-norm solution
/// and an orthonormal basis of the remaining directions.
pub fn bloch_slice(constraints: &[(CMat, f64)]) -> BlochSlice {
    let mut q: Vec<[f64; 3]> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut consistent = true;
    for (h, v) in constraints {
        let (h0, hv) = bloch_coords(h);
        let mut w = hv;
        let mut b = v - h0;
        for (qk, bk) in q.iter().zip(&rhs) {
            let p = dot(qk, &w);
            w = sub(&w, qk, p);
            b -= p * bk;
        }
        let nw = dot(&w, &w).sqrt();
        if nw > 1e-12 {
            q.push([w[0] / nw, w[1] / nw, w[2] / nw]);
            rhs.push(b / nw);
        } else if b.abs() > 1e-10 {
            consistent = false;
        }
    }
    let mut x0 = [0.0; 3];
    for (qk, bk) in q.iter().zip(&rhs) {
        for i in 0..3 {
            x0[i] += bk * qk[i];
        }
    }
    let mut null = Vec::new();
    for e in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
        let mut w = e;
        for qk in q.iter().chain(null.iter()) {
            let p = dot(qk, &w);
            w = sub(&w, qk, p);
        }
        let nw = dot(&w, &w).sqrt();
        if nw > 1e-8 {
            null.push([w[0] / nw, w[1] / nw, w[2] / nw]);
        }
    }
    let r2 = 1.0 - dot(&x0, &x0);
    BlochSlice {
        x0,
        null,
        feasible: consistent && r2 >= -1e-12,
        radius: r2.max(0.0).sqrt(),
    }
}

impl BlochSlice {
    /// Width of `tr(ρH)` over the slice.
    pub fn width(&self, h: &CMat) -> f64 {
        let (_, hv) = bloch_coords(h);
        let proj: f64 = self.null.iter().map(|n| dot(n, &hv).powi(2)).sum::<f64>().sqrt();
        2.0 * self.radius * proj
    }
}

/// Random qubit slices of every kind: interior, tangent, through a
/// boundary point, and fully determined.
pub fn random_qubit_slice(rng: &mut Gen) -> SpectrahedronSlice {
    let s = pauli();
    let kind = rng.gen_range(0..4);
    let point: Vec<f64> = match kind {
        1 | 2 => real_unit_vector(3, rng),
        _ => {
            let u = real_unit_vector(3, rng);
            let r: f64 = rng.gen_range(0.0..0.95);
            u.iter().map(|x| x * r).collect()
        }
    };
    let rho = (eye(2) + (0..3).fold(CMat::zeros(2, 2), |acc, k| acc + &s[k] * c(point[k], 0.0))) * c(0.5, 0.0);
    let mut normals: Vec<Vec<f64>> = Vec::new();
    match kind {
        1 => {
            // tangent: normals span a subspace containing the point
            normals.push(point.clone());
            if rng.gen_bool(0.5) {
                normals.push(real_unit_vector(3, rng));
            }
        }
        3 => {
            for _ in 0..3 {
                normals.push(real_unit_vector(3, rng));
            }
        }
        _ => {
            for _ in 0..rng.gen_range(1..=2) {
                normals.push(real_unit_vector(3, rng));
            }
        }
    }
    let mut slice = SpectrahedronSlice::new(2);
    for nrm in normals {
        let h0: f64 = rng.gen_range(-1.0..1.0);
        let h = eye(2) * c(h0, 0.0) + (0..3).fold(CMat::zeros(2, 2), |acc, k| acc + &s[k] * c(nrm[k], 0.0));
        let v = trace_prod(&rho, &h).re;
        slice.add(&h, v).unwrap();
    }
    slice
}
