//! Feasibility and width of spectrahedron slices, and LMI-constrained
//! maximization over subspaces.

mod choi;
mod hb;
pub mod lmi;
mod slice;

pub use choi::{choi_directions, choi_slice};
pub use hb::{lmi_maximize, LmiMaximum};
pub use slice::{feasible_point, reduce, width, width_on_face, DirectionWidth, Face, SpectrahedronSlice, WidthReport};
