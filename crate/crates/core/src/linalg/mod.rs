//! Dense complex linear algebra on `DMatrix<Complex64>`.

mod chol;
mod eig;
mod expm;
mod solve;

pub use chol::Chol;
pub use eig::{herm_eig, top_eigvec, EigDecomposition};
pub use expm::{expm, logm_pos};
pub use solve::{complex_null_space, real_lstsq, real_null_space, RMat};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Matrix unit E_ij (0-based).
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

pub fn from_real(rows: &[&[f64]]) -> CMat {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMat::from_fn(n, m, |i, j| c(rows[i][j], 0.0))
}

pub fn diag(d: &[Complex64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(d))
}

pub fn diag_real(d: &[f64]) -> CMat {
    CMat::from_fn(d.len(), d.len(), |i, j| if i == j { c(d[i], 0.0) } else { ZERO })
}

/// Hermitian part `(a + a*)/2`.
pub fn re_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// `(a − a*)/(2i)`, so that `a = Re a + i Im a`.
pub fn im_part(a: &CMat) -> CMat {
    (a - a.adjoint()) * c(0.0, -0.5)
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diagonal().sum()
}

/// `tr(a b)` without forming the product.
pub fn trace_prod(a: &CMat, b: &CMat) -> Complex64 {
    let n = a.nrows();
    let mut s = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

/// Frobenius inner product `tr(x* y)`.
pub fn inner(x: &CMat, y: &CMat) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn fro(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn all_finite(a: &CMat) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn check_square(a: &CMat, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {}x{}, expected a non-empty square matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    if !all_finite(a) {
        return Err(Error::InvalidInput(format!("{what} has non-finite entries")));
    }
    Ok(())
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Largest singular value.
pub fn op_norm(a: &CMat) -> f64 {
    let g = a.adjoint() * a;
    let e = herm_eig(&g).expect("finite input");
    e.max().max(0.0).sqrt()
}

pub fn min_eig(h: &CMat) -> f64 {
    herm_eig(h).expect("finite input").min()
}

pub fn max_eig(h: &CMat) -> f64 {
    herm_eig(h).expect("finite input").max()
}

/// `⟨b ξ, ξ⟩`.
pub fn quad(b: &CMat, xi: &CVec) -> Complex64 {
    xi.dotc(&(b * xi))
}

pub fn outer(u: &CVec, v: &CVec) -> CMat {
    u * v.adjoint()
}

/// Orthogonal projection onto the span of the given columns (assumed orthonormal).
pub fn proj_cols(v: &CMat) -> CMat {
    v * v.adjoint()
}

/// Orthonormal basis of the column span of `cols`, in order, by modified
/// Gram–Schmidt with the given relative drop threshold.
pub fn orthonormal_columns(cols: &[CVec], drop: f64) -> CMat {
    let n = cols.first().map_or(0, |v| v.len());
    let mut basis: Vec<CVec> = Vec::new();
    for v in cols {
        let scale = 1.0 + v.norm();
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let p = q.dotc(&w);
                w -= q * p;
            }
        }
        let nw = w.norm();
        if nw > drop * scale {
            basis.push(w / c(nw, 0.0));
        }
    }
    let mut m = CMat::zeros(n, basis.len());
    for (j, q) in basis.iter().enumerate() {
        m.set_column(j, q);
    }
    m
}

/// Real coordinates of a Hermitian matrix in an orthonormal basis of
/// Herm(n): diagonal entries, then `√2 Re h_ij`, `√2 Im h_ij` for i < j.
/// The map is an isometry from the Frobenius inner product to R^{n²}.
pub fn herm_coords(h: &CMat) -> Vec<f64> {
    let n = h.nrows();
    let s = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(h[(i, i)].re);
    }
    for i in 0..n {
        for j in i + 1..n {
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            out.push(s * z.re);
            out.push(s * z.im);
        }
    }
    out
}

pub fn herm_from_coords(x: &[f64], n: usize) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = CMat::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = c(x[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = c(s * x[k], s * x[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

/// The fixed orthonormal basis of Herm(n) matching `herm_coords`.
pub fn herm_basis(n: usize) -> Vec<CMat> {
    (0..n * n)
        .map(|k| {
            let mut x = vec![0.0; n * n];
            x[k] = 1.0;
            herm_from_coords(&x, n)
        })
        .collect()
}

/// Symmetrize to the nearest Hermitian matrix.
pub fn hermitize(h: &CMat) -> CMat {
    re_part(h)
}

/// Unit vector e_k in C^n.
pub fn basis_vec(n: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(n);
    v[k] = ONE;
    v
}
