//! Adaptive gradient descent for unconstrained objectives satisfying the
//! Polyak–Łojasiewicz condition, with gradients known up to `Δ` and optionally
//! values known up to `δ`.
//!
//! The step `x⁺ = x − h·g̃` uses `h = (1/L)(1 − Δ/‖g̃‖)`, the minimiser of the
//! upper model along `−g̃`. `(L, Δ[, δ])` are halved at the start of every
//! iteration and doubled until
//!
//! ```text
//! f_δ(x⁺) ≤ f_δ(x) + ⟨g̃, x⁺ − x⟩ + (L/2)‖x⁺ − x‖² + Δ‖x⁺ − x‖ [+ δ]
//! ```
//!
//! holds.

use crate::error::{check_dim, Error, Result};
use crate::oracle::ModelOracle;
use crate::triple::AdaptiveTriple;
use crate::vector::{dist, dist_sq, dot_diff, norm, Vector};

#[derive(Clone, Debug)]
pub struct PLConfig {
    pub x0: Vector,
    pub l0: f64,
    pub grad_err0: f64,
    /// 0 runs the exact-value method; positive enables the `δ`-slack variant.
    pub value_err0: f64,
    pub iterations: usize,
    /// Reporting constant of the rate/floor dichotomy; never affects iterates.
    pub c: f64,
    pub mu: Option<f64>,
    /// Clamp `Δ_{k+1} ≤ Δ` after every update.
    pub grad_err_cap: Option<f64>,
    pub f_star: Option<f64>,
    pub max_inner_per_iter: usize,
    /// Halve and double `Δ` (true) or hold it at `grad_err0` (false).
    pub adapt_grad_err: bool,
    pub keep_iterates: bool,
}

impl PLConfig {
    pub fn new(x0: Vector, l0: f64, iterations: usize) -> Self {
        Self {
            x0,
            l0,
            grad_err0: 0.0,
            value_err0: 0.0,
            iterations,
            c: 2.0,
            mu: None,
            grad_err_cap: None,
            f_star: None,
            max_inner_per_iter: 200,
            adapt_grad_err: true,
            keep_iterates: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iteration count must be at least 1".into()));
        }
        if !(self.c > 1.0) {
            return Err(Error::InvalidParameter(format!("C must exceed 1, got {}", self.c)));
        }
        if self.max_inner_per_iter == 0 {
            return Err(Error::InvalidParameter("inner-call cap must be at least 1".into()));
        }
        if let Some(mu) = self.mu {
            if !(mu > 0.0) {
                return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
            }
        }
        if let Some(cap) = self.grad_err_cap {
            if !(cap >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "Delta cap must be nonnegative, got {cap}"
                )));
            }
        }
        AdaptiveTriple::new(self.l0, self.value_err0, self.grad_err0).map(|_| ())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PLRecord {
    pub k: usize,
    /// `f_δ(x^k)`
    pub f_point: f64,
    /// `f_δ(x^{k+1})`
    pub f_next: f64,
    /// `‖g̃(x^k)‖`
    pub g_tilde: f64,
    pub h: f64,
    /// Accepted `(L_{k+1}, δ_{k+1}, Δ_{k+1})`.
    pub triple: AdaptiveTriple,
    pub inner_calls: usize,
    pub step_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PLTermination {
    CompletedN,
    /// `‖g̃‖ ≤ Δ_{k+1}` at the last point.
    SmallGradientFloor,
}

#[derive(Clone, Debug)]
pub struct PLTrace {
    pub records: Vec<PLRecord>,
    pub termination: PLTermination,
    /// `‖g̃‖` at the point where the floor was hit.
    pub final_g_tilde: Option<f64>,
    pub x_last: Vector,
    /// `f_δ(x^0), …, f_δ(x^last)`.
    pub values: Vec<f64>,
    pub iterates: Option<Vec<Vector>>,
    pub total_inner_calls: usize,
    /// Advisory requirement violations (e.g. `L₀ < 2μ`).
    pub warnings: Vec<String>,
}

impl PLTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// All recorded gradient norms, including the terminating one.
    pub fn gradient_norms(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.g_tilde).chain(self.final_g_tilde)
    }
}

/// `h = (1/L)(1 − Δ/g̃)`; fails when `g̃ ≤ Δ`.
pub fn pl_step_size(l: f64, grad_err: f64, g_tilde: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::InvalidParameter(format!("L must be positive, got {l}")));
    }
    if !(g_tilde > grad_err) {
        return Err(Error::SmallGradient { g_tilde, grad_err });
    }
    Ok((1.0 - grad_err / g_tilde) / l)
}

fn pl_rhs(f_point: f64, lin_term: f64, step_sq: f64, step_norm: f64, t: &AdaptiveTriple) -> f64 {
    f_point + lin_term + 0.5 * t.l * step_sq + t.grad_err * step_norm + t.value_err
}

/// Whether `x_next` passes the PL acceptance inequality; `value_err > 0` adds
/// the `δ` slack.
pub fn pl_acceptance<O: ModelOracle + ?Sized>(
    oracle: &O,
    x_k: &[f64],
    x_next: &[f64],
    l: f64,
    grad_err: f64,
    value_err: f64,
) -> Result<bool> {
    check_dim(oracle.dim(), x_k.len())?;
    check_dim(x_k.len(), x_next.len())?;
    let g = oracle.gradient(x_k);
    let t = AdaptiveTriple { l, value_err, grad_err };
    let rhs = pl_rhs(
        oracle.value(x_k),
        dot_diff(&g, x_next, x_k),
        dist_sq(x_next, x_k),
        dist(x_next, x_k),
        &t,
    );
    Ok(oracle.value(x_next) <= rhs)
}

/// Result of one [`Algo2::step`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted,
    /// `‖g̃‖ ≤ Δ_{k+1}`: no step taken, the run is over.
    Floor,
}

/// Stateful driver for the PL method.
pub struct Algo2<'a, O: ModelOracle + ?Sized> {
    oracle: &'a O,
    config: PLConfig,
    x: Vector,
    f_x: f64,
    triple: AdaptiveTriple,
    records: Vec<PLRecord>,
    values: Vec<f64>,
    iterates: Option<Vec<Vector>>,
    final_g_tilde: Option<f64>,
    total_inner: usize,
    warnings: Vec<String>,
}

impl<'a, O: ModelOracle + ?Sized> Algo2<'a, O> {
    pub fn new(config: &PLConfig, oracle: &'a O) -> Result<Self> {
        config.validate()?;
        check_dim(oracle.dim(), config.x0.dim())?;
        let mut warnings = Vec::new();
        if let Some(mu) = config.mu {
            if config.l0 < 2.0 * mu {
                warnings.push(format!("L0 = {} is below 2·mu = {}", config.l0, 2.0 * mu));
            }
        }
        let mut triple = AdaptiveTriple::new(config.l0, config.value_err0, config.grad_err0)?;
        if let Some(cap) = config.grad_err_cap {
            triple.grad_err = triple.grad_err.min(cap);
        }
        let f_x = oracle.value(&config.x0);
        Ok(Self {
            oracle,
            config: config.clone(),
            x: config.x0.clone(),
            f_x,
            triple,
            records: Vec::new(),
            values: vec![f_x],
            iterates: config.keep_iterates.then(|| vec![config.x0.clone()]),
            final_g_tilde: None,
            total_inner: 0,
            warnings,
        })
    }

    fn clamp(&self, mut t: AdaptiveTriple) -> AdaptiveTriple {
        if !self.config.adapt_grad_err {
            t.grad_err = self.config.grad_err0;
        }
        if let Some(cap) = self.config.grad_err_cap {
            t.grad_err = t.grad_err.min(cap);
        }
        t
    }

    /// One outer iteration; [`StepOutcome::Floor`] ends the run.
    pub fn step(&mut self) -> Result<StepOutcome> {
        let k = self.records.len();
        let g = self.oracle.gradient(&self.x);
        let g_tilde = norm(&g);
        let mut t = self.clamp(self.triple.halved());
        let mut calls = 0;
        loop {
            calls += 1;
            let h = match pl_step_size(t.l, t.grad_err, g_tilde) {
                Ok(h) => h,
                Err(Error::SmallGradient { .. }) => {
                    self.final_g_tilde = Some(g_tilde);
                    self.total_inner += calls - 1;
                    return Ok(StepOutcome::Floor);
                }
                Err(e) => return Err(e),
            };
            let x_next = Vector::from_raw(self.x.iter().zip(g.iter()).map(|(x, g)| x - h * g).collect());
            let f_next = self.oracle.value(&x_next);
            let step_norm = h * g_tilde;
            let rhs = pl_rhs(self.f_x, -h * g_tilde * g_tilde, step_norm * step_norm, step_norm, &t);
            if f_next <= rhs {
                self.records.push(PLRecord {
                    k,
                    f_point: self.f_x,
                    f_next,
                    g_tilde,
                    h,
                    triple: t,
                    inner_calls: calls,
                    step_norm,
                });
                self.total_inner += calls;
                self.triple = t;
                self.f_x = f_next;
                self.values.push(f_next);
                if let Some(it) = self.iterates.as_mut() {
                    it.push(x_next.clone());
                }
                self.x = x_next;
                return Ok(StepOutcome::Accepted);
            }
            if calls >= self.config.max_inner_per_iter {
                return Err(Error::NonTermination {
                    iter: k,
                    calls,
                    last: t,
                });
            }
            t = self.clamp(t.doubled());
        }
    }

    pub fn iteration(&self) -> usize {
        self.records.len()
    }

    pub fn current(&self) -> &Vector {
        &self.x
    }

    pub fn records(&self) -> &[PLRecord] {
        &self.records
    }

    pub fn final_g_tilde(&self) -> Option<f64> {
        self.final_g_tilde
    }

    pub fn finish(self, termination: PLTermination) -> PLTrace {
        PLTrace {
            records: self.records,
            termination,
            final_g_tilde: self.final_g_tilde,
            x_last: self.x,
            values: self.values,
            iterates: self.iterates,
            total_inner_calls: self.total_inner,
            warnings: self.warnings,
        }
    }
}

/// Runs the PL method for `config.iterations` steps, stopping early with floor
/// status when `‖g̃‖ ≤ Δ_{k+1}`.
pub fn algo2_run<O: ModelOracle + ?Sized>(config: &PLConfig, oracle: &O) -> Result<PLTrace> {
    let mut solver = Algo2::new(config, oracle)?;
    for _ in 0..config.iterations {
        if let StepOutcome::Floor = solver.step()? {
            return Ok(solver.finish(PLTermination::SmallGradientFloor));
        }
    }
    Ok(solver.finish(PLTermination::CompletedN))
}

fn rate_factor(mu: f64, l: f64, g_tilde: f64, grad_err_step: f64, grad_err: f64) -> f64 {
    let ratio = ((g_tilde - grad_err_step) / (g_tilde + grad_err)).max(0.0);
    1.0 - mu / l * ratio * ratio
}

const FACTOR_TOL: f64 = 1e-12;

/// `Π_i (1 − (μ/L_{i+1})((g̃_i − Δ_{i+1})/(g̃_i + Δ))²)`; multiply by the
/// initial gap for the bound on `f(x^{k+1}) − f*`.
pub fn pl_rate_bound(trace: &PLTrace, mu: f64, grad_err: f64) -> Result<f64> {
    pl_rate_factors(trace, mu, grad_err).map(|f| f.iter().product())
}

/// The individual factors of [`pl_rate_bound`].
pub fn pl_rate_factors(trace: &PLTrace, mu: f64, grad_err: f64) -> Result<Vec<f64>> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
    }
    trace
        .records
        .iter()
        .map(|r| pl_record_factor(r, mu, grad_err))
        .collect()
}

/// `1 − (μ/L_{k+1})((g̃_k − Δ_{k+1})/(g̃_k + Δ))²` for one accepted step.
pub fn pl_record_factor(r: &PLRecord, mu: f64, grad_err: f64) -> Result<f64> {
    let f = rate_factor(mu, r.triple.l, r.g_tilde, r.triple.grad_err, grad_err);
    if !(-FACTOR_TOL..=1.0 + FACTOR_TOL).contains(&f) {
        return Err(Error::InconsistentTrace(format!(
            "iteration {}: rate factor {f} outside [0, 1] (mu = {mu}, L = {})",
            r.k, r.triple.l
        )));
    }
    Ok(f.clamp(0.0, 1.0))
}

/// The non-adaptive product `Π_i (1 − (μ/L)((g̃_i − Δ)/(g̃_i + Δ))²)` over the
/// same gradient norms, with `Δ_{i+1} ≡ Δ` and a fixed `L`.
pub fn pl_nonadaptive_bound(trace: &PLTrace, mu: f64, l: f64, grad_err: f64) -> Result<f64> {
    pl_nonadaptive_factors(trace, mu, l, grad_err).map(|f| f.iter().product())
}

pub fn pl_nonadaptive_factors(trace: &PLTrace, mu: f64, l: f64, grad_err: f64) -> Result<Vec<f64>> {
    if !(mu > 0.0 && l >= mu) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < mu <= L, got mu = {mu}, L = {l}"
        )));
    }
    Ok(trace
        .records
        .iter()
        .map(|r| rate_factor(mu, l, r.g_tilde, grad_err, grad_err))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DichotomyBranch {
    /// `‖g̃_i‖ ≥ CΔ` throughout: `f(x^{k+1}) − f* ≤ (1 − (μ/L)((C−1)/(C+1))²)^{k+1}·gap₀`.
    Linear { bound: f64 },
    /// Some `‖g̃_i‖ < CΔ`: `min_i f(x^i) − f* < (C+1)²Δ²/(2μ)`.
    Floor { bound: f64, first_violation: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DichotomyReport {
    pub c: f64,
    pub branch: DichotomyBranch,
    /// Number of steps `k + 1` the linear bound covers.
    pub steps: usize,
}

/// Which side of the rate/floor dichotomy the trace certifies for constant `C`.
pub fn pl_dichotomy_check(trace: &PLTrace, mu: f64, l: f64, grad_err: f64, c: f64, gap0: f64) -> DichotomyReport {
    let steps = trace.records.len();
    let first_violation = trace.gradient_norms().position(|g| g < c * grad_err);
    let branch = match first_violation {
        Some(i) => DichotomyBranch::Floor {
            bound: pl_dichotomy_floor(mu, grad_err, c),
            first_violation: i,
        },
        None => {
            let q = (c - 1.0) / (c + 1.0);
            DichotomyBranch::Linear {
                bound: (1.0 - mu / l * q * q).powi(steps as i32) * gap0,
            }
        }
    };
    DichotomyReport { c, branch, steps }
}

/// `(C+1)²Δ²/(2μ)`
pub fn pl_dichotomy_floor(mu: f64, grad_err: f64, c: f64) -> f64 {
    (c + 1.0) * (c + 1.0) * grad_err * grad_err / (2.0 * mu)
}

/// `3δL/μ`: limiting error of the `δ`-slack variant at `Δ = 0` and constant `L`.
pub fn pl_inexact_floor(mu: f64, l: f64, value_err: f64) -> f64 {
    3.0 * value_err * l / mu
}
