//! Executable forms of the extension, excision and peaking results: each
//! check either produces a witness that is verified by direct eigensolves
//! or reports why none was found.

mod block;
mod boundary;
mod chain;
mod convexity;
mod detect;
mod excision;
mod extension;
mod peak;
mod pinnacle;
mod smooth;
mod warv;

pub use block::{block_pinnacle, BlockPinnacle};
pub use boundary::{boundary_rep_check, boundary_rep_check_in, BoundaryVerdict};
pub use chain::{chain_check, chain_check_in, ChainReport};
pub use convexity::{
    a_convexity_check, convexity_operator, default_t_grid, exp_curve, expderiv_check, Convexity, ConvexityStatus,
    DerivReport, DerivSample,
};
pub use detect::{detectable_check, detectable_check_in, Detection};
pub use excision::{
    excision_check, excision_check_in, peak_support_check, peak_support_check_in, ExcisionReport, PeakSupportWitness,
};
pub use extension::{
    extension_along, pep_scan, unique_extension_check, unique_extension_check_in, ExtensionReport, PepFailure, PepReport,
};
pub use peak::{peak_state_check, peak_state_check_in, PeakVerdict};
pub use pinnacle::{pinnacle_construct, pinnacle_construct_in, PinnacleCertificate};
pub use smooth::{
    e_membership, m23_density_probe, m23_hypotheses, normality_check, peak_from_e, peak_from_e_in, EMembership,
    Hypotheses, M23Report, NormalityCheck, PeakFromE,
};
pub use warv::{warv_verify, WarvPoint, WarvReport};
