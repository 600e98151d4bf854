use nalgebra::DVector;

use super::{c, check_square, CMat, CVec, ZERO};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct EigDecomposition {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column k belongs to `values[k]`.
    pub vectors: CMat,
}

impl EigDecomposition {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn vector(&self, k: usize) -> CVec {
        self.vectors.column(k).into_owned()
    }

    /// `U f(Λ) U*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        let u = &self.vectors;
        let d = DVector::from_iterator(self.values.len(), self.values.iter().map(|&x| c(f(x), 0.0)));
        let mut ud = u.clone();
        for (j, mut col) in ud.column_iter_mut().enumerate() {
            col *= d[j];
        }
        ud * u.adjoint()
    }

    /// Columns whose eigenvalues satisfy `keep`.
    pub fn columns_where(&self, keep: impl Fn(f64) -> bool) -> CMat {
        let idx: Vec<usize> = (0..self.values.len()).filter(|&k| keep(self.values[k])).collect();
        let n = self.vectors.nrows();
        let mut out = CMat::zeros(n, idx.len());
        for (j, &k) in idx.iter().enumerate() {
            out.set_column(j, &self.vectors.column(k));
        }
        out
    }
}

/// Cyclic Jacobi for Hermitian matrices. The input is symmetrized first.
pub fn herm_eig(h: &CMat) -> Result<EigDecomposition> {
    check_square(h, "Hermitian input")?;
    let n = h.nrows();
    let mut a = (h + h.adjoint()).scale(0.5);
    let mut v = CMat::identity(n, n);
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vectors.set_column(j, &v.column(i));
    }
    Ok(EigDecomposition { values, vectors })
}

fn rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r < 1e-300 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // phase that makes the (p,q) entry real and positive
    let ph = (apq / r).conj();
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    // G = diag(1, ph) · [[cs, sn], [-sn, cs]]
    let gpp = c(cs, 0.0);
    let gpq = c(sn, 0.0);
    let gqp = ph * (-sn);
    let gqq = ph * cs;
    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = c(a[(p, p)].re, 0.0);
    a[(q, q)] = c(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

/// Top eigenvalue, eigenvector and the gap to the next eigenvalue.
pub fn top_eigvec(h: &CMat) -> (f64, CVec, f64) {
    let e = herm_eig(h).expect("finite input");
    let n = e.values.len();
    let gap = if n > 1 { e.values[n - 1] - e.values[n - 2] } else { f64::INFINITY };
    (e.values[n - 1], e.vector(n - 1), gap)
}
