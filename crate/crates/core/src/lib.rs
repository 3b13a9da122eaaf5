//! Quantum query-model simulation for ordered search on a monotone 0-1
//! list, together with the weighted interval-subdivision adversary and a
//! numerical checker for every inequality the lower-bound argument uses.
//!
//! Module map:
//!
//! * [`state`] - amplitude vectors over the `|i, b, z>` register layout.
//! * [`query`] - threshold oracles and execution of query algorithms.
//! * [`algorithms`] - reference algorithms (lifted binary search, random).
//! * [`adversary`] - parameter derivation, `subdivide`, the outer schedule.
//! * [`verifier`] - hybrid distances, measurement distance, verdicts.
//! * [`suite`] - the randomized inequality suite.
//! * [`report`] - serialized documents, parameter reports and sweeps.

pub mod adversary;
pub mod algorithms;
pub mod error;
pub mod query;
pub mod report;
pub mod state;
pub mod suite;
pub mod verifier;

pub use adversary::{
    check_step_invariant, compute_v, construct_hard_input, derive_params, plan_schedule, subdivide,
    weighted_sum, AdversaryParams, AdversaryTrace, AttackOptions, Interval, InvariantReport,
    Schedule, Stage, SubdivideRecord,
};
pub use algorithms::{
    lifted_binary_search, random_algorithm, truncated_binary_search, zero_query, AlgorithmSpec,
};
pub use error::{Error, Result};
pub use query::{
    apply_oracle, run_full, run_hybrid, run_prefix, success_probability, QueryAlgorithm,
    ThresholdInput, Transform,
};
pub use state::{random_unit_state, BasisLayout, IndexDistribution, StateVector};
pub use verifier::{bv_gap, hybrid_profile, verdict, BvGap, HybridReport, Verdict};

pub use num_complex::Complex64;

/// Absolute tolerance for norm comparisons and proof inequalities.
pub const NORM_TOL: f64 = 1e-9;

/// Absolute tolerance for identities that hold exactly in real arithmetic.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Default success threshold of a binary-search algorithm.
pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 0.75;

/// Distance two final states of a correct algorithm must keep apart.
pub const DISTINGUISH_DISTANCE: f64 = 0.25;

/// Upper bound on the hybrid distance the adversary guarantees.
pub const HYBRID_BOUND: f64 = 0.2;
