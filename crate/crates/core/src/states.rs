//! Density matrices, vector states, restrictions and exposed pure states.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{real_part_span, support_in, CStarAlgebra, OperatorSubspace};
use crate::error::{Error, Result};
use crate::linalg::{c, check_square, herm_eig, hermitize, outer, quad, trace_prod, CMat, CVec};
use crate::tol::{Tolerances, DENSITY, SUPPORT_EIG};

#[derive(Debug, Clone)]
pub struct DensityState {
    rho: CMat,
}

impl DensityState {
    /// Validates positivity and unit trace after symmetrizing.
    pub fn new(rho: CMat) -> Result<Self> {
        check_square(&rho, "density matrix")?;
        let rho = hermitize(&rho);
        let e = herm_eig(&rho)?;
        if e.min() < -DENSITY {
            return Err(Error::InvalidInput(format!(
                "density matrix has eigenvalue {:.3e}",
                e.min()
            )));
        }
        let t = rho.trace().re;
        if (t - 1.0).abs() > DENSITY {
            return Err(Error::InvalidInput(format!("density matrix has trace {t}")));
        }
        Ok(DensityState { rho })
    }

    /// Skips validation; for matrices already known to be states up to
    /// solver noise.
    pub(crate) fn from_raw(rho: CMat) -> Self {
        DensityState { rho: hermitize(&rho) }
    }

    pub fn rho(&self) -> &CMat {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn rank(&self) -> usize {
        herm_eig(&self.rho)
            .unwrap()
            .values
            .iter()
            .filter(|&&x| x > SUPPORT_EIG)
            .count()
    }

    pub fn conjugate(&self, u: &CMat) -> DensityState {
        DensityState { rho: hermitize(&(u * &self.rho * u.adjoint())) }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        DensityState { rho: hermitize(&crate::rng::density_matrix(n, rng)) }
    }

    /// `(1 − s) ρ + s σ`.
    pub fn mix(&self, other: &DensityState, s: f64) -> DensityState {
        DensityState { rho: self.rho.scale(1.0 - s) + other.rho.scale(s) }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        DensityState { rho: CMat::identity(n, n).scale(1.0 / n as f64) }
    }
}

#[derive(Debug, Clone)]
pub struct PureState {
    xi: CVec,
}

impl PureState {
    /// Normalizes and fixes the phase: the first component whose modulus is
    /// within 1e-10 of the largest becomes real and non-negative.
    pub fn new(v: CVec) -> Result<Self> {
        let nv = v.norm();
        if !nv.is_finite() || nv < 1e-300 {
            return Err(Error::InvalidInput("state vector is zero or non-finite".into()));
        }
        let mut xi = v / c(nv, 0.0);
        let mx = xi.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let k = xi.iter().position(|z| z.norm() >= mx - 1e-10).unwrap();
        let ph = xi[k].conj() / xi[k].norm();
        xi *= ph;
        xi[k] = c(xi[k].re, 0.0);
        Ok(PureState { xi })
    }

    pub fn basis(n: usize, k: usize) -> Self {
        PureState::new(crate::linalg::basis_vec(n, k)).unwrap()
    }

    pub fn xi(&self) -> &CVec {
        &self.xi
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn density(&self) -> DensityState {
        DensityState { rho: outer(&self.xi, &self.xi) }
    }

    pub fn eval(&self, b: &CMat) -> Complex64 {
        quad(b, &self.xi)
    }

    /// Same ray up to `tol` in `1 − |⟨ξ, η⟩|`.
    pub fn same_ray(&self, other: &PureState, tol: f64) -> bool {
        1.0 - self.xi.dotc(&other.xi).norm() <= tol
    }

    pub fn conjugate(&self, u: &CMat) -> PureState {
        PureState::new(u * &self.xi).unwrap()
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        PureState::new(crate::rng::unit_vector(n, rng)).unwrap()
    }
}

/// `tr(ρ b)`.
pub fn evaluate(s: &DensityState, b: &CMat) -> Complex64 {
    trace_prod(&s.rho, b)
}

/// Projection onto the range of ρ.
pub fn left_support(s: &DensityState) -> CMat {
    let e = herm_eig(&s.rho).unwrap();
    let v = e.columns_where(|x| x > SUPPORT_EIG);
    &v * v.adjoint()
}

/// Support of the state as a state on `B`: the smallest projection in `B`
/// on which it is concentrated. Equals `left_support` when `B = M_n`.
pub fn support_on(b: &CStarAlgebra, s: &DensityState) -> CMat {
    let e = herm_eig(&s.rho).unwrap();
    let v = e.columns_where(|x| x > SUPPORT_EIG);
    support_in(b, &v)
}

/// Whether the vector state is pure as a state on `B`: its support `q`
/// satisfies `q b q = ω(b) q` for every `b` in `B`.
pub fn is_pure_on(b: &CStarAlgebra, w: &PureState, tol: f64) -> bool {
    let q = support_in(b, &CMat::from_columns(std::slice::from_ref(&w.xi)));
    b.space.basis().iter().all(|x| {
        let d = &q * x * &q - &q * w.eval(x);
        crate::linalg::op_norm(&d) <= tol * (1.0 + crate::linalg::op_norm(x))
    })
}

/// A pure state on `B`: top eigenvector of a random self-adjoint element,
/// resampled until it is pure on `B`.
pub fn random_pure_on<R: Rng + ?Sized>(b: &CStarAlgebra, rng: &mut R) -> PureState {
    let herm = b.hermitian_basis();
    let n = b.space.ambient_dim();
    for _ in 0..100 {
        let mut h = CMat::zeros(n, n);
        for x in &herm {
            h += x * c(crate::rng::gauss(rng), 0.0);
        }
        let (_, v, gap) = crate::linalg::top_eigvec(&h);
        let w = PureState::new(v).unwrap();
        if gap > 1e-6 && is_pure_on(b, &w, 1e-8) {
            return w;
        }
    }
    PureState::basis(n, 0)
}

#[derive(Debug, Clone)]
pub struct StateOnSubspace {
    pub values: Vec<Complex64>,
}

pub fn restrict(s: &DensityState, m: &OperatorSubspace) -> Result<StateOnSubspace> {
    if s.dim() != m.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "state on C^{}, subspace in M_{}",
            s.dim(),
            m.ambient_dim()
        )));
    }
    Ok(StateOnSubspace { values: m.basis().iter().map(|b| evaluate(s, b)).collect() })
}

#[derive(Debug, Clone)]
pub struct ExposedScan {
    pub states: Vec<PureState>,
    /// A direction exposing each state.
    pub exposing: Vec<CMat>,
    /// Directions whose top eigenvalue was degenerate.
    pub degenerate: usize,
    pub directions: usize,
}

/// Top eigenvectors of random unit directions in the real-part span of `M`.
pub fn exposed_pure_states<R: Rng + ?Sized>(
    m: &OperatorSubspace,
    directions: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> ExposedScan {
    let span = real_part_span(m);
    let n = m.ambient_dim();
    let mut states: Vec<PureState> = Vec::new();
    let mut exposing = Vec::new();
    let mut degenerate = 0;
    for _ in 0..directions {
        let u = crate::rng::real_unit_vector(span.basis.len(), rng);
        let mut h = CMat::zeros(n, n);
        for (x, w) in span.basis.iter().zip(&u) {
            h += x * c(*w, 0.0);
        }
        let (_, v, gap) = crate::linalg::top_eigvec(&h);
        if gap <= tol.degenerate_gap {
            degenerate += 1;
            continue;
        }
        let w = PureState::new(v).unwrap();
        if !states.iter().any(|s| s.same_ray(&w, tol.dedup)) {
            states.push(w);
            exposing.push(h);
        }
    }
    ExposedScan { states, exposing, degenerate, directions }
}
