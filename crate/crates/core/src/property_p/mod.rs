//! The rate function `f(u)` of a vertex-partition configuration, its
//! constraint system, and a multi-start search for its maximum.
//!
//! Property 𝒫 asks that `f` be uniformly negative on the constrained domain
//! with `α_R ≤ 0.995`. The search here gives numerical evidence, not a proof.

pub mod objective;
pub mod optimize;
pub mod scalar;
pub mod special;

pub use objective::{
    f_relaxed, f_total, feasibility, CheckKind, ConstraintCheck, FeasibilityOptions,
    FeasibilityReport, PartitionVector, DIM, EPS0, FLOWS,
};
pub use optimize::{
    local_solve, multistart_optimize, run_start, summarize, LocalOptimum, LocalResult,
    MultistartReport, OptimizerConfig,
};
pub use scalar::{Dual, Scalar};
pub use special::{
    balls_bins_exact, entropy, kappa_exponent, lambda_solve, relax_xlnx, sine_transform,
    sine_transform_inverse, t_exponent, BinsMode,
};
