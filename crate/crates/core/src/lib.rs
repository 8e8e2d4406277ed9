//! Exact finite-domain laboratory for multigroup-fairness learning
//! primitives.
//!
//! Everything operates on small, fully enumerated weighted domains, so every
//! metric — accuracy in expectation, calibration, multiaccuracy (plain,
//! weighted) and multicalibration — is an exact weighted sum rather than a
//! statistical estimate. On top of the auditors sit boosting-style learners
//! driven by an exhaustive weak-agnostic oracle, post-processing and span
//! projection, hardcore-measure constructions with density auditing, and
//! Boolean Fourier tooling including a query-access heavy-coefficient
//! search.

pub mod constructions;
pub mod cube;
pub mod error;
pub mod fourier;
pub mod hardcore;
pub mod hypothesis;
pub mod instance;
pub mod learners;
pub mod metrics;
pub mod postprocess;
pub mod predictor;
pub mod schema;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Tolerance for identities expected to hold up to floating-point roundoff.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Tolerance for inequalities backed by exact-arithmetic arguments.
pub const INEQ_TOL: f64 = 1e-9;
