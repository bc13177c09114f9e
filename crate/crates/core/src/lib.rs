//! Adaptive gradient methods for convex and Polyak–Łojasiewicz objectives that
//! admit an inexact `(δ, γ, Δ, L)`-model.
//!
//! The crate is organised bottom-up:
//!
//! * [`vector`], [`setup`], [`triple`], [`oracle`]: shared numerical types, the
//!   euclidean prox setup and the model-oracle contract every solver consumes.
//! * [`solver`]: the adaptive model method with its certificate, the restart
//!   variant for nonsmooth objectives, and the PL method with inexact gradients.
//! * [`problems`]: ball-sum and covering-ball test problems, least-squares PL
//!   quadratics, composite objectives and noise-injecting wrappers.
//! * [`harness`]: experiment specs, the table runner, paired comparisons,
//!   finite-difference checks and CSV output.
//!
//! With the default `parallel` feature, independent replications and large
//! objective evaluations are spread over a rayon thread pool. Without it every
//! loop runs sequentially; results are identical either way.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod error;
pub mod harness;
pub mod oracle;
pub(crate) mod par;
pub mod problems;
pub mod setup;
pub mod solver;
pub mod triple;
pub mod vector;

pub use error::{Error, Result};
pub use oracle::{Linearization, ModelOracle, OracleMeta, Regularizer};
pub use setup::{bregman_divergence, project_ball, DistanceGenerator, FeasibleSet, ProxSetup};
pub use triple::AdaptiveTriple;
pub use vector::Vector;

/// Whether this build spreads work over a thread pool.
pub const fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
