//! Seeded generators. Every randomized routine takes its generator as an
//! argument; trial `i` of a run with seed `s` uses `trial_rng(s, i)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, orthonormal_columns, CMat, CVec};

pub type Gen = ChaCha8Rng;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `index` of a run seeded with `seed`:
/// `splitmix64(seed ^ splitmix64(index))`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

pub fn seeded(seed: u64) -> Gen {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn trial_rng(seed: u64, index: u64) -> Gen {
    seeded(trial_seed(seed, index))
}

pub fn gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gauss<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    c(gauss(rng), gauss(rng))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    CMat::from_fn(n, n, |_, _| complex_gauss(rng))
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    CVec::from_fn(n, |_, _| complex_gauss(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    let v = gaussian_vector(n, rng);
    let nv = v.norm();
    v / c(nv, 0.0)
}

/// Uniform point on the unit sphere of R^d.
pub fn real_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| gauss(rng)).collect();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-12 {
            return v.into_iter().map(|x| x / nv).collect();
        }
    }
}

pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = gaussian_matrix(n, rng);
    (&g + g.adjoint()).scale(0.5)
}

pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    loop {
        let cols: Vec<CVec> = (0..n).map(|_| gaussian_vector(n, rng)).collect();
        let q = orthonormal_columns(&cols, 1e-8);
        if q.ncols() == n {
            return q;
        }
    }
}

/// `GG*/tr(GG*)` for a complex Gaussian `G`.
pub fn density_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = gaussian_matrix(n, rng);
    let r = &g * g.adjoint();
    let t = r.trace().re;
    r.scale(1.0 / t)
}
