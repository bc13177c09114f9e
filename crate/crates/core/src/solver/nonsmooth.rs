//! Restart variant of the model method for nonsmooth objectives with a known,
//! finite `Δ`.
//!
//! Per outer iteration the step constant is doubled at fixed `Δ` until either
//! the `Δ`-term of the step is at most `ε/2`, or the smooth inequality
//! `f(x⁺) ≤ f(x) + ⟨g, x⁺ − x⟩ + 2^{p−1}·L·‖x⁺ − x‖²` holds.

use crate::error::{check_dim, Error, Result};
use crate::oracle::{Linearization, ModelOracle};
use crate::setup::ProxSetup;
use crate::solver::model::{acceptance_rhs, trial_step, Algo1Config, Algo1Trace, IterRecord, TraceBuilder, Trial};
use crate::triple::AdaptiveTriple;
use crate::vector::Vector;

/// Never halve the running step constant below `L₀·2⁻⁵⁰`.
const HALVING_FLOOR_EXP: i32 = -50;

#[derive(Clone, Debug)]
pub struct NonsmoothConfig {
    /// Outer-loop settings; `value_err0`/`grad_err0` are ignored.
    pub base: Algo1Config,
    /// Target accuracy `ε`.
    pub epsilon: f64,
    /// Class constant `Δ` held fixed inside the restart procedure.
    pub grad_err_known: f64,
    pub l_known: Option<f64>,
    /// Cap on doublings per outer iteration.
    pub p_cap: usize,
}

impl NonsmoothConfig {
    pub fn new(base: Algo1Config, epsilon: f64, grad_err_known: f64, l_known: Option<f64>) -> Self {
        Self {
            base,
            epsilon,
            grad_err_known,
            l_known,
            p_cap: 64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.grad_err_known >= 0.0 && self.grad_err_known.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Delta must be finite and nonnegative, got {}",
                self.grad_err_known
            )));
        }
        if let Some(l) = self.l_known {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidParameter(format!("known L must be positive, got {l}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// `Δ·‖x⁺ − x‖ ≤ ε/2`
    DeltaTermSmall,
    /// The smooth inequality with coefficient `2^{p−1}·L`.
    SmoothInequality,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RestartRecord {
    pub k: usize,
    /// Doublings performed.
    pub p_used: usize,
    pub stop_reason: StopReason,
    pub final_l: f64,
}

#[derive(Clone, Debug)]
pub struct NonsmoothTrace {
    pub trace: Algo1Trace,
    pub restarts: Vec<RestartRecord>,
    /// No `L` was supplied, so the running estimate stood in for it in the
    /// smooth stop rule and the accuracy guarantee does not apply.
    pub heuristic: bool,
}

/// Smallest integer `p` with `2^p > 1 + 16Δ²/(εL)`.
pub fn p_bound(grad_err: f64, epsilon: f64, l: f64) -> usize {
    let target = 1.0 + 16.0 * grad_err * grad_err / (epsilon * l);
    let mut p = 0usize;
    let mut pow = 1.0f64;
    while pow <= target {
        pow *= 2.0;
        p += 1;
    }
    p
}

/// Number of subgradient evaluations guaranteeing `f(x̂) − f* ≤ ε`:
/// `⌈(4LR²/ε + 64Δ²R²/ε²)·max(1, log₂(1 + 16Δ²/(εL)))⌉`.
pub fn complexity_estimate(l: f64, radius: f64, grad_err: f64, epsilon: f64) -> u64 {
    let r2 = radius * radius;
    let outer = 4.0 * l * r2 / epsilon + 64.0 * grad_err * grad_err * r2 / (epsilon * epsilon);
    let log_factor = (1.0 + 16.0 * grad_err * grad_err / (epsilon * l)).log2().max(1.0);
    (outer * log_factor).ceil() as u64
}

/// Outer-iteration count `4LR²/ε + 64Δ²R²/ε²`, rounded up.
pub fn outer_iterations_needed(l: f64, radius: f64, grad_err: f64, epsilon: f64) -> usize {
    let r2 = radius * radius;
    (4.0 * l * r2 / epsilon + 64.0 * grad_err * grad_err * r2 / (epsilon * epsilon)).ceil() as usize
}

/// The restart procedure from `x_k` starting at step constant `l_start`.
///
/// `l_reference` is the `L` of the smooth stop rule; pass `None` to use
/// `l_start`. With `grad_err_fixed = 0` the `Δ`-term rule is vacuous and only
/// the smooth rule is applied.
#[allow(clippy::too_many_arguments)]
pub fn restart_inner<O: ModelOracle + ?Sized>(
    oracle: &O,
    setup: &ProxSetup,
    x_k: &[f64],
    l_start: f64,
    grad_err_fixed: f64,
    epsilon: f64,
    l_reference: Option<f64>,
    p_cap: usize,
) -> Result<(Vector, RestartRecord)> {
    check_dim(oracle.dim(), x_k.len())?;
    if !(l_start > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "starting L must be positive, got {l_start}"
        )));
    }
    let lin = oracle.linearize(x_k);
    let (trial, rec, _) = restart_from(
        oracle,
        setup,
        &lin,
        0,
        l_start,
        grad_err_fixed,
        epsilon,
        l_reference,
        p_cap,
    )?;
    Ok((trial.x_next, rec))
}

#[allow(clippy::too_many_arguments)]
fn restart_from<O: ModelOracle + ?Sized>(
    oracle: &O,
    setup: &ProxSetup,
    lin: &Linearization,
    k: usize,
    l_start: f64,
    grad_err_fixed: f64,
    epsilon: f64,
    l_reference: Option<f64>,
    p_cap: usize,
) -> Result<(Trial, RestartRecord, usize)> {
    let l_ref = l_reference.unwrap_or(l_start);
    let mut l = l_start;
    let mut p = 0usize;
    loop {
        let smooth = AdaptiveTriple {
            l,
            value_err: 0.0,
            grad_err: 0.0,
        };
        let trial = trial_step(oracle, setup, lin, &smooth)?;
        let reason = if grad_err_fixed > 0.0 && grad_err_fixed * trial.step_norm <= 0.5 * epsilon {
            Some(StopReason::DeltaTermSmall)
        } else {
            // 2^{p-1}·L_ref·‖d‖² written as (2^p·L_ref)·V so that L_ref = l_start
            // reproduces the plain acceptance test exactly.
            let coef = AdaptiveTriple {
                l: l_ref * 2f64.powi(p as i32),
                value_err: 0.0,
                grad_err: 0.0,
            };
            (trial.f_next <= acceptance_rhs(lin.value, trial.psi, trial.divergence, trial.step_norm, &coef))
                .then_some(StopReason::SmoothInequality)
        };
        if let Some(stop_reason) = reason {
            let rec = RestartRecord {
                k,
                p_used: p,
                stop_reason,
                final_l: l,
            };
            return Ok((trial, rec, p + 1));
        }
        if p >= p_cap {
            return Err(Error::RestartCapExceeded { iter: k, cap: p_cap, l });
        }
        l *= 2.0;
        p += 1;
    }
}

/// Stateful driver for the restart variant; [`Nonsmooth::step`] performs one
/// outer iteration.
pub struct Nonsmooth<'a, O: ModelOracle + ?Sized> {
    oracle: &'a O,
    setup: &'a ProxSetup,
    config: NonsmoothConfig,
    floor: f64,
    builder: TraceBuilder,
    restarts: Vec<RestartRecord>,
    x: Vector,
    l_prev: f64,
}

impl<'a, O: ModelOracle + ?Sized> Nonsmooth<'a, O> {
    /// Requires exact values and `γ = 0`.
    pub fn new(config: &NonsmoothConfig, oracle: &'a O, setup: &'a ProxSetup) -> Result<Self> {
        config.validate()?;
        let meta = oracle.meta();
        if !meta.exact_values || meta.gamma != 0.0 {
            return Err(Error::UnsupportedCombination(
                "the restart procedure needs exact values and gamma = 0".into(),
            ));
        }
        let base = &config.base;
        check_dim(oracle.dim(), base.x0.dim())?;
        setup.set.check_dim(base.x0.dim())?;
        if !setup.set.contains(&base.x0) {
            return Err(Error::InvalidParameter(
                "starting point lies outside the feasible set".into(),
            ));
        }
        Ok(Self {
            oracle,
            setup,
            floor: base.l0 * 2f64.powi(HALVING_FLOOR_EXP),
            builder: TraceBuilder::new(&base.x0, base.keep_iterates),
            restarts: Vec::with_capacity(base.iterations),
            x: base.x0.clone(),
            l_prev: base.l0,
            config: config.clone(),
        })
    }

    pub fn iteration(&self) -> usize {
        self.builder.records.len()
    }

    pub fn current(&self) -> &Vector {
        &self.x
    }

    pub fn s_n(&self) -> f64 {
        self.builder.s_n
    }

    pub fn x_hat(&self) -> Vector {
        self.builder.x_hat()
    }

    pub fn best_value(&self) -> f64 {
        self.builder.best_value()
    }

    pub fn records(&self) -> &[IterRecord] {
        &self.builder.records
    }

    pub fn restarts(&self) -> &[RestartRecord] {
        &self.restarts
    }

    /// `(R² + Σ Δ_{k+1}‖x^{k+1} − x^k‖/L_{k+1})/S_N`, once an iteration exists.
    pub fn certificate_with(&self, radius_sq: f64) -> Option<f64> {
        (!self.builder.records.is_empty()).then(|| self.builder.certificate(radius_sq, 0.0))
    }

    pub fn step(&mut self) -> Result<(&IterRecord, &RestartRecord)> {
        let k = self.iteration();
        let mut l_start = (0.5 * self.l_prev).max(self.floor);
        if let Some(l) = self.config.l_known {
            // Enter each iteration with L ≤ L_{k+1} ≤ 2L.
            l_start = l_start.clamp(l, 2.0 * l);
        }
        let lin = self.oracle.linearize(&self.x);
        let (trial, restart, calls) = restart_from(
            self.oracle,
            self.setup,
            &lin,
            k,
            l_start,
            self.config.grad_err_known,
            self.config.epsilon,
            self.config.l_known,
            self.config.p_cap,
        )?;
        let grad_err = match restart.stop_reason {
            StopReason::DeltaTermSmall => self.config.grad_err_known,
            StopReason::SmoothInequality => 0.0,
        };
        let rec = IterRecord {
            k,
            f_point: lin.value,
            f_next: trial.f_next,
            triple: AdaptiveTriple {
                l: restart.final_l,
                value_err: 0.0,
                grad_err,
            },
            inner_calls: calls,
            step_norm: trial.step_norm,
            model_value: trial.psi,
            divergence: trial.divergence,
        };
        self.l_prev = restart.final_l;
        self.builder.push(rec, &trial.x_next);
        self.restarts.push(restart);
        self.x = trial.x_next;
        Ok((
            self.builder.records.last().expect("record just pushed"),
            self.restarts.last().expect("record just pushed"),
        ))
    }

    pub fn finish(self, stopped_early: bool) -> NonsmoothTrace {
        NonsmoothTrace {
            trace: self.builder.finish(self.x, stopped_early),
            restarts: self.restarts,
            heuristic: self.config.l_known.is_none(),
        }
    }
}

/// Model-method outer loop with the restart procedure in place of the plain
/// acceptance loop. Requires exact values and `γ = 0`.
pub fn nonsmooth_run<O: ModelOracle + ?Sized>(
    config: &NonsmoothConfig,
    oracle: &O,
    setup: &ProxSetup,
) -> Result<NonsmoothTrace> {
    let mut solver = Nonsmooth::new(config, oracle, setup)?;
    let radius_sq = config.base.radius.map(|r| r * r);
    for _ in 0..config.base.iterations {
        solver.step()?;
        if let (Some(r2), Some(eps)) = (radius_sq, config.base.epsilon) {
            if solver.certificate_with(r2).is_some_and(|c| c <= eps) {
                return Ok(solver.finish(true));
            }
        }
    }
    Ok(solver.finish(false))
}
