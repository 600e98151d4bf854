//! Unital subspaces of M_n, generated C*-algebras and their block structure.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    c, check_square, complex_null_space, eye, herm_basis, herm_coords, herm_eig,
    herm_from_coords, im_part, inner, orthonormal_columns, re_part, real_lstsq, CMat, CVec,
    RMat,
};
use crate::rng::seeded;
use crate::tol::{GRAM_DROP, SPAN};

/// A linear subspace of M_n held as a Frobenius-orthonormal basis. The
/// flags are always recomputed from the basis.
#[derive(Debug, Clone)]
pub struct OperatorSubspace {
    n: usize,
    basis: Vec<CMat>,
    pub unital: bool,
    pub selfadjoint: bool,
    pub algebra_closed: bool,
}

impl OperatorSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, x: &CMat) -> CMat {
        let mut p = CMat::zeros(self.n, self.n);
        for b in &self.basis {
            p += b * inner(b, x);
        }
        p
    }

    pub fn coeffs(&self, x: &CMat) -> Vec<num_complex::Complex64> {
        self.basis.iter().map(|b| inner(b, x)).collect()
    }

    pub fn combine(&self, coeffs: &[num_complex::Complex64]) -> CMat {
        let mut x = CMat::zeros(self.n, self.n);
        for (b, z) in self.basis.iter().zip(coeffs) {
            x += b * *z;
        }
        x
    }

    pub fn distance(&self, x: &CMat) -> f64 {
        crate::linalg::fro(&(x - self.project(x)))
    }

    pub fn contains(&self, x: &CMat) -> bool {
        self.distance(x) <= SPAN * (1.0 + crate::linalg::fro(x))
    }

    /// Random element with complex Gaussian coordinates.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> CMat {
        let z: Vec<_> = (0..self.dim()).map(|_| crate::rng::complex_gauss(rng)).collect();
        self.combine(&z)
    }

    fn from_orthonormal(n: usize, basis: Vec<CMat>) -> Self {
        let mut s = OperatorSubspace { n, basis, unital: false, selfadjoint: false, algebra_closed: false };
        s.unital = s.contains(&eye(n));
        s.selfadjoint = s.basis.iter().all(|b| s.contains(&b.adjoint()));
        s.algebra_closed = s
            .basis
            .iter()
            .all(|x| s.basis.iter().all(|y| s.contains(&(x * y))));
        s
    }

    /// Image under `x ↦ u x u*`.
    pub fn conjugate(&self, u: &CMat) -> OperatorSubspace {
        let mats: Vec<CMat> = self.basis.iter().map(|b| u * b * u.adjoint()).collect();
        make_subspace(&mats, false).expect("unitary image of a valid subspace")
    }
}

/// Appends `x` to an orthonormal family unless it already lies in its span.
fn push_orthonormal(basis: &mut Vec<CMat>, x: &CMat) -> bool {
    let scale = 1.0 + crate::linalg::fro(x);
    let mut w = x.clone();
    for _ in 0..2 {
        for b in basis.iter() {
            let p = inner(b, &w);
            w -= b * p;
        }
    }
    let nw = crate::linalg::fro(&w);
    if nw > GRAM_DROP * scale {
        basis.push(w / c(nw, 0.0));
        true
    } else {
        false
    }
}

pub fn make_subspace(matrices: &[CMat], require_unital: bool) -> Result<OperatorSubspace> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::InvalidInput("empty list of matrices".into()))?;
    let n = first.nrows();
    for (k, m) in matrices.iter().enumerate() {
        check_square(m, &format!("matrix {k}"))?;
        if m.nrows() != n {
            return Err(Error::InvalidInput(format!(
                "matrix {k} is {}x{}, expected {n}x{n}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    let mut basis = Vec::new();
    if require_unital {
        push_orthonormal(&mut basis, &eye(n));
    }
    for m in matrices {
        push_orthonormal(&mut basis, m);
    }
    if basis.is_empty() {
        return Err(Error::InvalidInput("matrices span the zero subspace".into()));
    }
    Ok(OperatorSubspace::from_orthonormal(n, basis))
}

pub fn member_distance(x: &CMat, m: &OperatorSubspace) -> Result<f64> {
    if x.nrows() != m.n || x.ncols() != m.n {
        return Err(Error::DimensionMismatch(format!(
            "element is {}x{}, subspace lives in M_{}",
            x.nrows(),
            x.ncols(),
            m.n
        )));
    }
    Ok(m.distance(x))
}

#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    /// Minimal central projections, ordered by the first standard basis
    /// index they touch.
    pub central_projections: Vec<CMat>,
    /// `n_i` with `p_i B ≅ M_{n_i}`.
    pub block_dims: Vec<usize>,
    /// Multiplicity of block i in C^n: `rank p_i = n_i · m_i`.
    pub multiplicities: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct CStarAlgebra {
    pub space: OperatorSubspace,
    pub blocks: BlockDecomposition,
}

impl CStarAlgebra {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Canonical orthonormal basis of the self-adjoint part.
    pub fn hermitian_basis(&self) -> Vec<CMat> {
        real_part_span(&self.space).basis
    }

    /// Index of the block whose central projection supports `xi`, if any.
    pub fn block_of(&self, xi: &CVec) -> Option<usize> {
        self.blocks
            .central_projections
            .iter()
            .position(|p| (xi.norm_squared() - crate::linalg::quad(p, xi).re).abs() <= 1e-8)
    }
}

/// Closes `M` under adjoints and products.
pub fn generate_cstar(m: &OperatorSubspace) -> CStarAlgebra {
    let n = m.n;
    let mut basis: Vec<CMat> = Vec::new();
    push_orthonormal(&mut basis, &eye(n));
    for b in &m.basis {
        push_orthonormal(&mut basis, b);
        push_orthonormal(&mut basis, &b.adjoint());
    }
    for _ in 0..=n * n {
        let current = basis.clone();
        let mut grew = false;
        for x in &current {
            for y in &current {
                grew |= push_orthonormal(&mut basis, &(x * y));
            }
        }
        if !grew {
            break;
        }
    }
    let space = OperatorSubspace::from_orthonormal(n, basis);
    let blocks = block_decompose_space(&space);
    CStarAlgebra { space, blocks }
}

/// Unital algebra generated by `mats`, closed under products only.
pub fn generate_algebra(mats: &[CMat], n: usize) -> Result<OperatorSubspace> {
    let mut basis: Vec<CMat> = Vec::new();
    push_orthonormal(&mut basis, &eye(n));
    for (k, b) in mats.iter().enumerate() {
        if b.nrows() != n || b.ncols() != n {
            return Err(Error::DimensionMismatch(format!("generator {k} is not {n}x{n}")));
        }
        push_orthonormal(&mut basis, b);
    }
    for _ in 0..=n * n {
        let current = basis.clone();
        let mut grew = false;
        for x in &current {
            for y in &current {
                grew |= push_orthonormal(&mut basis, &(x * y));
            }
        }
        if !grew {
            break;
        }
    }
    Ok(OperatorSubspace::from_orthonormal(n, basis))
}

/// `span{a c* : a, c ∈ A}`, an operator system when `A` is unital.
pub fn product_system(a: &OperatorSubspace) -> OperatorSubspace {
    let mut basis: Vec<CMat> = Vec::new();
    for x in a.basis() {
        for y in a.basis() {
            push_orthonormal(&mut basis, &(x * y.adjoint()));
        }
    }
    OperatorSubspace::from_orthonormal(a.ambient_dim(), basis)
}

pub fn block_decompose(b: &CStarAlgebra) -> BlockDecomposition {
    block_decompose_space(&b.space)
}

fn block_decompose_space(space: &OperatorSubspace) -> BlockDecomposition {
    let n = space.n;
    let d = space.dim();
    // commutation system  Σ_j x_j [b_j, b_k] = 0  for every k
    let mut sys = CMat::zeros(d * n * n, d);
    for (j, bj) in space.basis.iter().enumerate() {
        for (k, bk) in space.basis.iter().enumerate() {
            let comm = bj * bk - bk * bj;
            for (e, z) in comm.iter().enumerate() {
                sys[(k * n * n + e, j)] = *z;
            }
        }
    }
    let null = complex_null_space(&sys, 1e-9);
    let mut herm: Vec<Vec<f64>> = Vec::new();
    for x in &null {
        let z = space.combine(x.as_slice());
        for h in [re_part(&z), im_part(&z)] {
            herm.push(herm_coords(&h));
        }
    }
    let center: Vec<CMat> = real_orthonormal(&herm, GRAM_DROP)
        .iter()
        .map(|v| herm_from_coords(v, n))
        .collect();
    let k = center.len().max(1);

    let mut weights: Vec<f64> = (1..=center.len()).map(|w| w as f64).collect();
    let mut rng = seeded(0x5eed_b10c);
    let mut projections = Vec::new();
    for _attempt in 0..64 {
        let mut z = CMat::zeros(n, n);
        for (h, w) in center.iter().zip(&weights) {
            z += h * c(*w, 0.0);
        }
        projections = spectral_projections(&z);
        if projections.len() == k {
            break;
        }
        weights = (0..center.len())
            .map(|_| rng.gen_range(1..=1000) as f64 / rng.gen_range(1..=97) as f64)
            .collect();
    }
    projections.sort_by(|p, q| {
        let key = |m: &CMat| {
            let i = (0..n).find(|&i| m[(i, i)].re > 1e-6).unwrap_or(n);
            (i, -m[(i.min(n - 1), i.min(n - 1))].re)
        };
        let (a, x) = key(p);
        let (b, y) = key(q);
        a.cmp(&b).then(x.total_cmp(&y))
    });
    let mut block_dims = Vec::new();
    let mut multiplicities = Vec::new();
    for p in &projections {
        let mut span = Vec::new();
        for b in &space.basis {
            push_orthonormal(&mut span, &(p * b));
        }
        let ni = (span.len() as f64).sqrt().round().max(1.0) as usize;
        let rank = crate::linalg::trace(p).re.round() as usize;
        block_dims.push(ni);
        multiplicities.push((rank / ni).max(1));
    }
    BlockDecomposition { central_projections: projections, block_dims, multiplicities }
}

/// Projections onto the eigenspaces of a Hermitian matrix, grouping
/// eigenvalues closer than 1e-6 (relative).
fn spectral_projections(z: &CMat) -> Vec<CMat> {
    let e = herm_eig(z).expect("finite");
    let scale = 1.0 + e.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..e.values.len() {
        match groups.last_mut() {
            Some(g) if e.values[k] - e.values[*g.last().unwrap()] <= 1e-6 * scale => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
        .iter()
        .map(|g| {
            let mut p = CMat::zeros(z.nrows(), z.nrows());
            for &k in g {
                let v = e.vector(k);
                p += &v * v.adjoint();
            }
            p
        })
        .collect()
}

fn real_orthonormal(vecs: &[Vec<f64>], drop: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vecs {
        let scale = 1.0 + v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let p: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= p * qi;
                }
            }
        }
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nw > drop * scale {
            out.push(w.into_iter().map(|x| x / nw).collect());
        }
    }
    out
}

/// Real span of `{Re a, Re(ia)}` over a subspace, with preimages in it.
#[derive(Debug, Clone)]
pub struct RealSpan {
    /// Orthonormal Hermitian basis (real Frobenius inner product).
    pub basis: Vec<CMat>,
    /// `preimages[k] ∈ M` with `Re preimages[k] = basis[k]`.
    pub preimages: Vec<CMat>,
}

/// The basis is canonical: it is obtained by projecting a fixed basis of
/// Herm(n) onto the span and orthonormalizing in order, so it depends only
/// on the span itself and not on how `M` was presented.
pub fn real_part_span(m: &OperatorSubspace) -> RealSpan {
    let n = m.n;
    let mut gens: Vec<Vec<f64>> = Vec::new();
    for a in &m.basis {
        gens.push(herm_coords(&re_part(a)));
        gens.push(herm_coords(&re_part(&(a * crate::linalg::I))));
    }
    let q = real_orthonormal(&gens, GRAM_DROP);
    let nn = n * n;
    let projected: Vec<Vec<f64>> = herm_basis(n)
        .iter()
        .map(|e| {
            let x = herm_coords(e);
            let mut p = vec![0.0; nn];
            for qk in &q {
                let d: f64 = qk.iter().zip(&x).map(|(a, b)| a * b).sum();
                for (pi, qi) in p.iter_mut().zip(qk) {
                    *pi += d * qi;
                }
            }
            p
        })
        .collect();
    let canon = real_orthonormal(&projected, 1e-8);

    let mut gen_mat = RMat::zeros(nn, gens.len());
    for (j, g) in gens.iter().enumerate() {
        for (i, x) in g.iter().enumerate() {
            gen_mat[(i, j)] = *x;
        }
    }
    let mut basis = Vec::new();
    let mut preimages = Vec::new();
    for h in &canon {
        let (x, _res) = real_lstsq(&gen_mat, h, 1e-12);
        let mut pre = CMat::zeros(n, n);
        for (j, a) in m.basis.iter().enumerate() {
            pre += a * c(x[2 * j], x[2 * j + 1]);
        }
        basis.push(herm_from_coords(h, n));
        preimages.push(pre);
    }
    RealSpan { basis, preimages }
}

/// Basis of the commutant `{y : yb = by for all b}` of a set of matrices.
pub fn commutant(mats: &[CMat], n: usize) -> Vec<CMat> {
    let mut sys = CMat::zeros(mats.len().max(1) * n * n, n * n);
    for s in 0..n {
        for t in 0..n {
            let col = s * n + t;
            let e = crate::linalg::unit(n, s, t);
            for (k, b) in mats.iter().enumerate() {
                let comm = &e * b - b * &e;
                for (idx, z) in comm.iter().enumerate() {
                    sys[(k * n * n + idx, col)] = *z;
                }
            }
        }
    }
    complex_null_space(&sys, 1e-10)
        .into_iter()
        .map(|v| CMat::from_fn(n, n, |i, j| v[i * n + j]))
        .collect()
}

/// Projection onto `[B' V]`, the smallest projection of `B` dominating the
/// columns of `v`. For a vector state this is its support in `B`.
pub fn support_in(b: &CStarAlgebra, v: &CMat) -> CMat {
    let n = b.space.n;
    let comm = commutant(b.space.basis(), n);
    let mut cols: Vec<CVec> = Vec::new();
    for j in 0..v.ncols() {
        let x = v.column(j).into_owned();
        cols.push(x.clone());
        for y in &comm {
            cols.push(y * &x);
        }
    }
    let q = orthonormal_columns(&cols, 1e-9);
    &q * q.adjoint()
}

/// Named subspaces used throughout the tests and the command line.
pub mod catalog {
    use super::*;
    use crate::linalg::unit;

    pub fn full(n: usize) -> OperatorSubspace {
        let mats: Vec<CMat> = (0..n).flat_map(|i| (0..n).map(move |j| unit(n, i, j))).collect();
        make_subspace(&mats, true).unwrap()
    }

    pub fn upper_triangular(n: usize) -> OperatorSubspace {
        let mats: Vec<CMat> = (0..n).flat_map(|i| (i..n).map(move |j| unit(n, i, j))).collect();
        make_subspace(&mats, true).unwrap()
    }

    pub fn diagonal(n: usize) -> OperatorSubspace {
        let mats: Vec<CMat> = (0..n).map(|i| unit(n, i, i)).collect();
        make_subspace(&mats, true).unwrap()
    }

    /// `C·I + strictly upper triangular`.
    pub fn scalar_plus_strict_upper(n: usize) -> OperatorSubspace {
        let mats: Vec<CMat> = (0..n).flat_map(|i| (i + 1..n).map(move |j| unit(n, i, j))).collect();
        make_subspace(&mats, true).unwrap()
    }

    /// `span{I, E_{12}}` in M_2.
    pub fn identity_and_nilpotent() -> OperatorSubspace {
        make_subspace(&[unit(2, 0, 1)], true).unwrap()
    }

    /// Block-diagonal direct sum of full matrix algebras.
    pub fn block_full(dims: &[usize]) -> OperatorSubspace {
        block_of(dims, |_, _| true)
    }

    /// Block-diagonal direct sum of upper triangular algebras.
    pub fn block_upper(dims: &[usize]) -> OperatorSubspace {
        block_of(dims, |i, j| i <= j)
    }

    fn block_of(dims: &[usize], keep: impl Fn(usize, usize) -> bool) -> OperatorSubspace {
        let n: usize = dims.iter().sum();
        let mut mats = Vec::new();
        let mut off = 0;
        for &d in dims {
            for i in 0..d {
                for j in 0..d {
                    if keep(i, j) {
                        mats.push(unit(n, off + i, off + j));
                    }
                }
            }
            off += d;
        }
        make_subspace(&mats, true).unwrap()
    }

    pub fn identity_only(n: usize) -> OperatorSubspace {
        make_subspace(&[eye(n)], true).unwrap()
    }
}
