//! Schmidt-rank norms and entanglement certification.
//!
//! This crate computes the `s(k)` vector norms and `S(k)` operator norms that
//! arise from the Schmidt rank of bipartite pure states, certifies k-block
//! positivity and Schmidt number through spectral tests and semidefinite
//! programming hierarchies, and implements the applications built on top of
//! them: Werner-state bound-entanglement analysis, minimum gate fidelity,
//! maximum output purity, realignment tests, and the geometric measure of
//! entanglement.
//!
//! Modules:
//! - [`densemat`]: dense complex linear algebra and singular-value norms
//! - [`tensor`]: Kronecker products, partial trace/transpose, realignment,
//!   swap operators and the symmetric subspace
//! - [`channels`]: Choi matrices, Kraus/Stinespring forms, standard maps
//! - [`schmidt`]: Schmidt decompositions and the `s(k)` vector norms
//! - [`conic`]: a dense primal-dual interior-point solver for SDPs over
//!   direct sums of Hermitian PSD blocks
//! - [`sknorm`]: the `S(k)` operator-norm engine (see-saw lower bounds, SDP
//!   and hierarchy upper bounds, error bounds)
//! - [`blockpos`]: k-block-positivity certification rules
//! - [`apps`]: Werner states, bound entanglement, gate fidelity, output
//!   purity, realignment/reduction tests, geometric measure

pub mod apps;
pub mod blockpos;
pub mod channels;
pub mod conic;
pub mod densemat;
pub mod error;
pub mod schmidt;
pub mod sknorm;
pub mod tensor;

pub use channels::{Channel, KrausSet, StinespringForm};
pub use densemat::{ComplexMatrix, HermEigResult, SvdResult};
pub use error::{Error, Result};
pub use schmidt::SchmidtData;
pub use sknorm::NormEstimate;
pub use tensor::{BipartiteOperator, MultiDims};

/// Complex scalar used throughout the crate.
pub type Scalar = num_complex::Complex64;
