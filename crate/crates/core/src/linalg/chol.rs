use super::{c, CMat};

/// Cholesky factor `a = L L*` of a Hermitian positive definite matrix.
/// Construction fails on any non-positive pivot.
#[derive(Debug, Clone)]
pub struct Chol {
    l: CMat,
}

impl Chol {
    pub fn new(a: &CMat) -> Option<Chol> {
        let n = a.nrows();
        let mut l = CMat::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = c(djj, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(Chol { l })
    }

    pub fn logdet(&self) -> f64 {
        (0..self.l.nrows()).map(|i| 2.0 * self.l[(i, i)].re.ln()).sum()
    }

    /// `a⁻¹ b`.
    pub fn solve(&self, b: &CMat) -> CMat {
        let n = self.l.nrows();
        let mut x = b.clone();
        for col in 0..b.ncols() {
            for i in 0..n {
                let mut s = x[(i, col)];
                for k in 0..i {
                    s -= self.l[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = s / self.l[(i, i)].re;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, col)];
                for k in i + 1..n {
                    s -= self.l[(k, i)].conj() * x[(k, col)];
                }
                x[(i, col)] = s / self.l[(i, i)].re;
            }
        }
        x
    }
}
