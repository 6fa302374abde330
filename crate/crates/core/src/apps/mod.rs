//! The application suite on top of the S(k)-norm machinery: Werner-state
//! analysis, bound-entanglement projections and undistillability, minimum
//! gate fidelity (with the NP-hardness construction), maximum output purity,
//! realignment and reduction tests, and the geometric measure of
//! entanglement.

pub mod bound_ent;
pub mod detect;
pub mod fidelity;
pub mod geom;
pub mod purity;
pub mod werner;

pub use bound_ent::{
    bound_ent_report, bound_proj, bound_proj_bipartite, bound_proj_s1, bound_proj_s1_verified,
    bound_proj_s2_bounds, certify_undistillable, certify_undistillable_rational,
    undistillable_region, BoundEntReport,
};
pub use detect::{realignment_test, reduction_test, DetectionVerdict};
pub use fidelity::{fidelity_identity, min_gate_fidelity, nphard_channel, FidelityReport};
pub use geom::{geometric_measure, GeomMeasure};
pub use purity::{cb_output_purity, max_output_purity};
pub use werner::{werner_sk_norm, werner_thresholds, WernerThresholds};
