use nalgebra::DMatrix;

use super::{CMat, CVec};

pub type RMat = DMatrix<f64>;

/// Orthonormal basis (as columns) of the null space of a real matrix.
/// Singular values at or below `rel_tol * max(1, σ_max)` count as zero.
pub fn real_null_space(a: &RMat, rel_tol: f64) -> RMat {
    let (m, n) = a.shape();
    if n == 0 {
        return RMat::zeros(0, 0);
    }
    let padded = if m < n {
        let mut p = RMat::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().fold(0.0f64, |x, &y| x.max(y));
    let thr = rel_tol * smax.max(1.0);
    let idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= thr)
        .collect();
    let mut out = RMat::zeros(n, idx.len());
    for (j, &k) in idx.iter().enumerate() {
        out.set_column(j, &vt.row(k).transpose());
    }
    out
}

/// Minimum-norm least-squares solution and the residual norm ‖Ax − b‖.
pub fn real_lstsq(a: &RMat, b: &[f64], rel_tol: f64) -> (Vec<f64>, f64) {
    let (m, n) = a.shape();
    if n == 0 {
        let r = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        return (vec![], r);
    }
    let bv = nalgebra::DVector::from_column_slice(b);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |x, &y| x.max(y));
    let x = svd
        .solve(&bv, rel_tol * smax.max(1e-300))
        .unwrap_or_else(|_| nalgebra::DVector::zeros(n));
    let r = (a * &x - &bv).norm();
    let _ = m;
    (x.iter().copied().collect(), r)
}

/// Null space of a complex matrix, as unit column vectors.
pub fn complex_null_space(a: &CMat, rel_tol: f64) -> Vec<CVec> {
    let (m, n) = a.shape();
    if n == 0 {
        return vec![];
    }
    let padded = if m < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().fold(0.0f64, |x, &y| x.max(y));
    let thr = rel_tol * smax.max(1.0);
    (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= thr)
        .map(|k| vt.row(k).adjoint())
        .collect()
}
