//! Adaptive first-order solvers.
//!
//! * [`model`]: the adaptive method for convex objectives with an inexact
//!   model, its weighted-average output and certificate.
//! * [`nonsmooth`]: the same outer loop with the fixed-`Δ` restart procedure.
//! * [`pl`]: adaptive gradient descent under the Polyak–Łojasiewicz condition.

pub mod model;
pub mod nonsmooth;
pub mod pl;

pub use model::{
    acceptance_test, algo1_run, certificate_bound, inner_call_budget, model_step, Algo1, Algo1Config, Algo1Trace,
    IterRecord,
};
pub use nonsmooth::{
    complexity_estimate, nonsmooth_run, outer_iterations_needed, p_bound, restart_inner, Nonsmooth, NonsmoothConfig,
    NonsmoothTrace, RestartRecord, StopReason,
};
pub use pl::{
    algo2_run, pl_acceptance, pl_dichotomy_check, pl_dichotomy_floor, pl_inexact_floor, pl_nonadaptive_bound,
    pl_nonadaptive_factors, pl_rate_bound, pl_rate_factors, pl_record_factor, pl_step_size, Algo2, DichotomyBranch,
    DichotomyReport, PLConfig, PLRecord, PLTermination, PLTrace, StepOutcome,
};
