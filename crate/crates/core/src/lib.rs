//! Unique state extensions, excision and peaking elements for unital
//! subspaces of M_n.
//!
//! States live on the C*-algebra `B = C*(M)` generated by the subspace. They
//! are carried as density matrices on `C^n`, and two density matrices
//! describe the same state on `B` when they agree on a basis of `B`.

pub mod algebra;
pub mod certify;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod numrange;
pub mod rng;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec};
pub use tol::Tolerances;
