use super::slice::SpectrahedronSlice;
use crate::algebra::OperatorSubspace;
use crate::error::{Error, Result};
use crate::linalg::{kron, re_part, unit, CMat, I};

/// Slice of normalized Choi matrices `C = (1/k) Σ E_st ⊗ Φ(E_st)` of unital
/// completely positive maps `Φ: M_n → M_k` with `Φ = π` on `M`.
///
/// `Φ(x)_ij = k · tr(C (xᵀ ⊗ E_ji))`, so every prescribed value is an affine
/// constraint on `C`, and `C ⪰ 0` is complete positivity.
pub fn choi_slice(m: &OperatorSubspace, pi: &dyn Fn(&CMat) -> CMat, k: usize) -> Result<SpectrahedronSlice> {
    let n = m.ambient_dim();
    if k == 0 {
        return Err(Error::InvalidInput("representation space is zero".into()));
    }
    let mut slice = SpectrahedronSlice::new(n * k);
    let kf = k as f64;
    for x in m.basis() {
        let px = pi(x);
        if px.nrows() != k || px.ncols() != k {
            return Err(Error::DimensionMismatch(format!(
                "representation returned {}x{}, expected {k}x{k}",
                px.nrows(),
                px.ncols()
            )));
        }
        for i in 0..k {
            for j in 0..k {
                let probe = kron(&x.transpose(), &unit(k, j, i));
                slice.add_complex(&probe, px[(i, j)] / kf)?;
            }
        }
    }
    Ok(slice)
}

/// Hermitian directions `Re(xᵀ ⊗ E_ji)`, `Re(i xᵀ ⊗ E_ji)` over a basis of
/// the algebra: the slice is a singleton along them iff the extension to the
/// algebra is unique.
pub fn choi_directions(basis: &[CMat], k: usize) -> Vec<CMat> {
    let mut out = Vec::new();
    for x in basis {
        for i in 0..k {
            for j in 0..k {
                let probe = kron(&x.transpose(), &unit(k, j, i));
                out.push(re_part(&probe));
                out.push(re_part(&(probe * I)));
            }
        }
    }
    out
}
