//! Certification of increasing principal minors for Hermitian positive
//! semidefinite matrices, the minimal scaling that grants the property, and
//! greedy max-determinant principal-submatrix selection.
//!
//! A nonzero PSD matrix `A` (with `m > 1`) satisfies `det A[I] ≤ det A[J]` for
//! every `I ⊂ J` if and only if `A` is positive definite and the diagonal of
//! `A⁻¹` is bounded by one. When that holds, `w(I) = ln det A[I]` is
//! nondecreasing and submodular, so greedy selection reaches at least
//! `1 − e⁻¹` of the best `k`-subset value.

pub mod certify;
pub mod cli;
pub mod error;
pub mod greedy;
pub mod linalg;
pub mod matrixgen;
pub mod minors;
pub mod registry;
mod serde_util;

pub use certify::{
    brute_force_increasing, certify_increasing, eigenvalue_sufficient, full_pair_increasing,
    scaling_threshold, Certificate, Certifier, Method, Reason, ScalingThreshold, Verdict,
};
pub use error::{Error, Result};
pub use greedy::{
    exact_maxdet, greedy_maxdet, greedy_maxdet_with, guarantee_report, ExactResult, GreedyStrategy,
    GreedyTrace, GuaranteeReport,
};
pub use linalg::{
    determinant, inverse, ldl_factor, principal_submatrix, validate_hermitian, ComplexScalar,
    Definiteness, HermitianMatrix, IndexSet, LdlFactor,
};
pub use matrixgen::{generate, Family, GenParams, GenSpec};
pub use minors::{
    check_hadamard_fischer, check_submodularity, check_sylvester, log_det_set_function,
    principal_minor, InequalityReport, PropertyCheck, PropertyReport, SetFunctionValue,
};
pub use registry::Registry;
