//! Adaptive gradient method for convex objectives admitting an inexact model.
//!
//! Each outer iteration halves the triple `(L, δ, Δ)`, solves the model
//! subproblem and doubles the triple until
//!
//! ```text
//! f_δ(x⁺) ≤ f_δ(x) + ψ(x⁺, x) + L·V(x⁺, x) + Δ‖x⁺ − x‖ + δ
//! ```
//!
//! holds. The output is the `1/L`-weighted average of the accepted iterates.

use crate::error::{check_dim, Error, Result};
use crate::oracle::{Linearization, ModelOracle};
use crate::setup::ProxSetup;
use crate::triple::AdaptiveTriple;
use crate::vector::{dist, Vector};

#[derive(Clone, Debug)]
pub struct Algo1Config {
    pub x0: Vector,
    pub l0: f64,
    pub value_err0: f64,
    pub grad_err0: f64,
    /// Number of outer iterations `N`.
    pub iterations: usize,
    /// `R` with `V(x*, x⁰) ≤ R²`; enables the online certificate.
    pub radius: Option<f64>,
    /// Stop early once the online certificate drops to this level.
    pub epsilon: Option<f64>,
    pub max_inner_per_iter: usize,
    /// Irreducible value inexactness `δ` added to the certificate. Defaults to
    /// 0 for exact-valued oracles, else to the oracle's known `δ`.
    pub report_value_err: Option<f64>,
    /// Keep `x⁰, …, x^N` in the trace (needed for `γ > 0` certificates).
    pub keep_iterates: bool,
}

impl Algo1Config {
    pub fn new(x0: Vector, l0: f64, iterations: usize) -> Self {
        Self {
            x0,
            l0,
            value_err0: 0.0,
            grad_err0: 0.0,
            iterations,
            radius: None,
            epsilon: None,
            max_inner_per_iter: 200,
            report_value_err: None,
            keep_iterates: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iteration count must be at least 1".into()));
        }
        if self.max_inner_per_iter == 0 {
            return Err(Error::InvalidParameter("inner-call cap must be at least 1".into()));
        }
        if let Some(r) = self.radius {
            if !(r >= 0.0) {
                return Err(Error::InvalidParameter(format!("R must be nonnegative, got {r}")));
            }
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0) {
                return Err(Error::InvalidParameter(format!("epsilon must be positive, got {e}")));
            }
        }
        AdaptiveTriple::new(self.l0, self.value_err0, self.grad_err0).map(|_| ())
    }

    pub(crate) fn initial_triple(&self) -> AdaptiveTriple {
        AdaptiveTriple {
            l: self.l0,
            value_err: self.value_err0,
            grad_err: self.grad_err0,
        }
    }
}

/// One accepted outer iteration `x^k → x^{k+1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterRecord {
    pub k: usize,
    /// `f_δ(x^k)` as used by the acceptance test.
    pub f_point: f64,
    /// `f_δ(x^{k+1})`.
    pub f_next: f64,
    /// Accepted `(L_{k+1}, δ_{k+1}, Δ_{k+1})`.
    pub triple: AdaptiveTriple,
    pub inner_calls: usize,
    /// `‖x^{k+1} − x^k‖`
    pub step_norm: f64,
    /// `ψ(x^{k+1}, x^k)`
    pub model_value: f64,
    /// `V(x^{k+1}, x^k)`
    pub divergence: f64,
}

impl IterRecord {
    /// Right-hand side of the acceptance inequality for this record.
    pub fn acceptance_rhs(&self) -> f64 {
        acceptance_rhs(
            self.f_point,
            self.model_value,
            self.divergence,
            self.step_norm,
            &self.triple,
        )
    }
}

#[derive(Clone, Debug)]
pub struct Algo1Trace {
    pub records: Vec<IterRecord>,
    /// `S_N = Σ 1/L_{k+1}`
    pub s_n: f64,
    /// `x̂ = (1/S_N) Σ x^{k+1}/L_{k+1}`
    pub x_hat: Vector,
    pub x_last: Vector,
    pub total_inner_calls: usize,
    /// Smallest `f_δ` over `x^1, …, x^N`.
    pub best_value: f64,
    pub best_point: Vector,
    /// `x⁰, …, x^N` when requested.
    pub iterates: Option<Vec<Vector>>,
    pub stopped_early: bool,
}

impl Algo1Trace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

pub(crate) fn acceptance_rhs(f_point: f64, psi: f64, divergence: f64, step_norm: f64, t: &AdaptiveTriple) -> f64 {
    f_point + psi + t.l * divergence + t.grad_err * step_norm + t.value_err
}

/// `argmin_{x ∈ Q} ψ(x, x_k) + L·V(x, x_k)`.
pub fn model_step<O: ModelOracle + ?Sized>(oracle: &O, setup: &ProxSetup, x_k: &[f64], l: f64) -> Result<Vector> {
    check_dim(oracle.dim(), x_k.len())?;
    setup.set.check_dim(x_k.len())?;
    let lin = oracle.linearize(x_k);
    setup.solve_subproblem(&lin, oracle.regularizer(), l)
}

/// Whether the acceptance inequality holds for the trial `x_next` under `t`.
pub fn acceptance_test<O: ModelOracle + ?Sized>(
    oracle: &O,
    setup: &ProxSetup,
    x_k: &[f64],
    x_next: &[f64],
    t: &AdaptiveTriple,
) -> Result<bool> {
    check_dim(oracle.dim(), x_k.len())?;
    check_dim(x_k.len(), x_next.len())?;
    let lin = oracle.linearize(x_k);
    let psi = lin.model(x_next, oracle.regularizer());
    let v = setup.divergence(x_next, x_k);
    let rhs = acceptance_rhs(lin.value, psi, v, dist(x_next, x_k), t);
    Ok(oracle.value(x_next) <= rhs)
}

/// Running sums shared by the plain and restart variants.
#[derive(Clone, Debug)]
pub(crate) struct TraceBuilder {
    pub(crate) records: Vec<IterRecord>,
    pub(crate) s_n: f64,
    weighted: Vec<f64>,
    /// `Σ (δ_{k+1} + Δ_{k+1}‖x^{k+1} − x^k‖)/L_{k+1}`
    pub(crate) slack_sum: f64,
    pub(crate) total_inner: usize,
    best_value: f64,
    best_point: Vector,
    iterates: Option<Vec<Vector>>,
}

impl TraceBuilder {
    pub(crate) fn new(x0: &Vector, keep_iterates: bool) -> Self {
        Self {
            records: Vec::new(),
            s_n: 0.0,
            weighted: vec![0.0; x0.dim()],
            slack_sum: 0.0,
            total_inner: 0,
            best_value: f64::INFINITY,
            best_point: x0.clone(),
            iterates: keep_iterates.then(|| vec![x0.clone()]),
        }
    }

    pub(crate) fn push(&mut self, rec: IterRecord, x_next: &Vector) {
        let w = 1.0 / rec.triple.l;
        self.s_n += w;
        for (acc, xi) in self.weighted.iter_mut().zip(x_next.iter()) {
            *acc += w * xi;
        }
        self.slack_sum += (rec.triple.value_err + rec.triple.grad_err * rec.step_norm) * w;
        self.total_inner += rec.inner_calls;
        if rec.f_next < self.best_value {
            self.best_value = rec.f_next;
            self.best_point = x_next.clone();
        }
        if let Some(it) = self.iterates.as_mut() {
            it.push(x_next.clone());
        }
        self.records.push(rec);
    }

    pub(crate) fn x_hat(&self) -> Vector {
        let inv = 1.0 / self.s_n;
        Vector::from_raw(self.weighted.iter().map(|w| w * inv).collect())
    }

    /// `γ = 0` certificate with the given `R²` and report `δ`.
    pub(crate) fn certificate(&self, radius_sq: f64, report_value_err: f64) -> f64 {
        (radius_sq + self.slack_sum) / self.s_n + report_value_err
    }

    pub(crate) fn best_value(&self) -> f64 {
        self.best_value
    }

    pub(crate) fn finish(self, x_last: Vector, stopped_early: bool) -> Algo1Trace {
        let x_hat = self.x_hat();
        Algo1Trace {
            records: self.records,
            s_n: self.s_n,
            x_hat,
            x_last,
            total_inner_calls: self.total_inner,
            best_value: self.best_value,
            best_point: self.best_point,
            iterates: self.iterates,
            stopped_early,
        }
    }
}

pub(crate) fn resolve_report_value_err(explicit: Option<f64>, meta: &crate::oracle::OracleMeta) -> Option<f64> {
    explicit.or(if meta.exact_values {
        Some(0.0)
    } else {
        meta.known_value_err
    })
}

/// Stateful driver; [`Algo1::step`] performs one outer iteration.
pub struct Algo1<'a, O: ModelOracle + ?Sized> {
    oracle: &'a O,
    setup: &'a ProxSetup,
    cap: usize,
    x: Vector,
    triple: AdaptiveTriple,
    builder: TraceBuilder,
    radius_sq: Option<f64>,
    report_value_err: Option<f64>,
}

impl<'a, O: ModelOracle + ?Sized> Algo1<'a, O> {
    pub fn new(config: &Algo1Config, oracle: &'a O, setup: &'a ProxSetup) -> Result<Self> {
        config.validate()?;
        check_dim(oracle.dim(), config.x0.dim())?;
        setup.set.check_dim(config.x0.dim())?;
        if !setup.set.contains(&config.x0) {
            return Err(Error::InvalidParameter(
                "starting point lies outside the feasible set".into(),
            ));
        }
        Ok(Self {
            oracle,
            setup,
            cap: config.max_inner_per_iter,
            x: config.x0.clone(),
            triple: config.initial_triple(),
            builder: TraceBuilder::new(&config.x0, config.keep_iterates),
            radius_sq: config.radius.map(|r| r * r),
            report_value_err: resolve_report_value_err(config.report_value_err, &oracle.meta()),
        })
    }

    pub fn iteration(&self) -> usize {
        self.builder.records.len()
    }

    pub fn current(&self) -> &Vector {
        &self.x
    }

    pub fn triple(&self) -> AdaptiveTriple {
        self.triple
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

    /// Online `γ = 0` certificate, when `R` and the report `δ` are known.
    pub fn certificate(&self) -> Option<f64> {
        if self.builder.records.is_empty() {
            return None;
        }
        Some(self.builder.certificate(self.radius_sq?, self.report_value_err?))
    }

    /// Same as [`Algo1::certificate`] with an explicit `R²`.
    pub fn certificate_with(&self, radius_sq: f64) -> Option<f64> {
        if self.builder.records.is_empty() {
            return None;
        }
        Some(self.builder.certificate(radius_sq, self.report_value_err?))
    }

    /// One outer iteration: halve the triple, then solve and double until accepted.
    pub fn step(&mut self) -> Result<&IterRecord> {
        let k = self.iteration();
        let lin = self.oracle.linearize(&self.x);
        let mut t = self.triple.halved();
        let mut calls = 0;
        let (rec, x_next) = loop {
            calls += 1;
            let trial = trial_step(self.oracle, self.setup, &lin, &t)?;
            if trial.f_next <= acceptance_rhs(lin.value, trial.psi, trial.divergence, trial.step_norm, &t) {
                let rec = IterRecord {
                    k,
                    f_point: lin.value,
                    f_next: trial.f_next,
                    triple: t,
                    inner_calls: calls,
                    step_norm: trial.step_norm,
                    model_value: trial.psi,
                    divergence: trial.divergence,
                };
                break (rec, trial.x_next);
            }
            if calls >= self.cap {
                return Err(Error::NonTermination {
                    iter: k,
                    calls,
                    last: t,
                });
            }
            t = t.doubled();
        };
        self.triple = t;
        self.builder.push(rec, &x_next);
        self.x = x_next;
        Ok(self.builder.records.last().expect("record just pushed"))
    }

    pub fn finish(self, stopped_early: bool) -> Algo1Trace {
        self.builder.finish(self.x, stopped_early)
    }
}

pub(crate) struct Trial {
    pub(crate) x_next: Vector,
    pub(crate) f_next: f64,
    pub(crate) psi: f64,
    pub(crate) divergence: f64,
    pub(crate) step_norm: f64,
}

pub(crate) fn trial_step<O: ModelOracle + ?Sized>(
    oracle: &O,
    setup: &ProxSetup,
    lin: &Linearization,
    t: &AdaptiveTriple,
) -> Result<Trial> {
    let x_next = setup.solve_subproblem(lin, oracle.regularizer(), t.l)?;
    let f_next = oracle.value(&x_next);
    let psi = lin.model(&x_next, oracle.regularizer());
    let divergence = setup.divergence(&x_next, &lin.point);
    let step_norm = dist(&x_next, &lin.point);
    Ok(Trial {
        x_next,
        f_next,
        psi,
        divergence,
        step_norm,
    })
}

/// Runs `config.iterations` outer iterations, or fewer when the online
/// certificate reaches `config.epsilon` (only with `R` given and `γ = 0`).
pub fn algo1_run<O: ModelOracle + ?Sized>(config: &Algo1Config, oracle: &O, setup: &ProxSetup) -> Result<Algo1Trace> {
    let mut solver = Algo1::new(config, oracle, setup)?;
    let early_stop = oracle.meta().gamma == 0.0;
    for _ in 0..config.iterations {
        solver.step()?;
        if let (true, Some(eps), Some(cert)) = (early_stop, config.epsilon, solver.certificate()) {
            if cert <= eps {
                return Ok(solver.finish(true));
            }
        }
    }
    Ok(solver.finish(false))
}

/// Upper bound on `f(x̂) − f(x*)`:
///
/// `R²/S_N + (1/S_N) Σ [δ_{k+1} + Δ_{k+1}‖x^{k+1} − x^k‖ + γ‖x^k − x*‖]/L_{k+1} + δ`.
///
/// The `γ` term needs both a reference `x*` and the stored iterates.
pub fn certificate_bound(
    trace: &Algo1Trace,
    radius: f64,
    gamma: f64,
    x_star: Option<&[f64]>,
    report_value_err: f64,
) -> Result<f64> {
    if trace.records.is_empty() || !(trace.s_n > 0.0) {
        return Err(Error::CertificateUnavailable("trace has no accepted iterations".into()));
    }
    let mut sum = 0.0;
    if gamma > 0.0 {
        let x_star = x_star.ok_or_else(|| {
            Error::CertificateUnavailable("gamma > 0 needs a reference minimiser for the distance term".into())
        })?;
        let iterates = trace
            .iterates
            .as_ref()
            .ok_or_else(|| Error::CertificateUnavailable("gamma > 0 needs the stored iterates".into()))?;
        for (rec, x_k) in trace.records.iter().zip(iterates) {
            check_dim(x_k.dim(), x_star.len())?;
            let t = &rec.triple;
            sum += (t.value_err + t.grad_err * rec.step_norm + gamma * dist(x_k, x_star)) / t.l;
        }
    } else {
        for rec in &trace.records {
            let t = &rec.triple;
            sum += (t.value_err + t.grad_err * rec.step_norm) / t.l;
        }
    }
    Ok((radius * radius + sum) / trace.s_n + report_value_err)
}

/// Bound on the total number of subproblem solves over `N` iterations:
/// `⌈2N + max{log₂(2L/L₀), log₂(2δ/δ₀), log₂(2Δ/Δ₀)}⌉`, each log clamped at 0.
///
/// Pairs with both entries zero are skipped; `None` means unbounded (a true
/// constant is positive while its starting estimate is zero).
pub fn inner_call_budget(
    n: usize,
    l0: f64,
    value_err0: f64,
    grad_err0: f64,
    l: f64,
    value_err: f64,
    grad_err: f64,
) -> Option<u64> {
    let mut worst = 0.0f64;
    for (c, c0) in [(l, l0), (value_err, value_err0), (grad_err, grad_err0)] {
        if c == 0.0 && c0 == 0.0 {
            continue;
        }
        if c0 == 0.0 || !c.is_finite() {
            return None;
        }
        worst = worst.max((2.0 * c / c0).log2().max(0.0));
    }
    Some((2.0 * n as f64 + worst).ceil() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{FnOracle, OracleMeta, Regularizer};
    use crate::problems::composite::composite_oracle;
    use crate::problems::quadratic::QuadraticOracle;
    use crate::setup::FeasibleSet;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    /// Oracle whose gradient is a fixed vector: `f(x) = ⟨g, x⟩`.
    fn linear(g: Vec<f64>) -> impl ModelOracle {
        let n = g.len();
        let g2 = g.clone();
        FnOracle::new(
            n,
            move |x| x.iter().zip(&g).map(|(a, b)| a * b).sum(),
            move |_| g2.clone(),
            OracleMeta::exact(Some(0.0)),
        )
    }

    fn half_sq() -> impl ModelOracle {
        FnOracle::new(1, |x| 0.5 * x[0] * x[0], |x| vec![x[0]], OracleMeta::exact(Some(1.0)))
    }

    #[test]
    fn model_step_examples() {
        let s = ProxSetup::unconstrained();
        assert_eq!(
            model_step(&linear(vec![2.0, 0.0]), &s, &[0.0, 0.0], 4.0).unwrap(),
            v(&[-0.5, 0.0])
        );
        let ball = ProxSetup::euclidean(FeasibleSet::unit_ball(2));
        assert_eq!(
            model_step(&linear(vec![-4.0, 0.0]), &ball, &[0.0, 0.0], 2.0).unwrap(),
            v(&[1.0, 0.0])
        );
        assert!(model_step(&linear(vec![1.0]), &s, &[0.0], 0.0).is_err());
    }

    #[test]
    fn model_step_composite_soft_threshold() {
        // g = -3 at x = 0 with h = |x|: argmin -3x + |x| + x²/2 = 2.
        let smooth = FnOracle::new(1, |x| -3.0 * x[0], |_| vec![-3.0], OracleMeta::exact(Some(0.0)));
        let o = composite_oracle(smooth, Regularizer::L1 { weight: 1.0 }).unwrap();
        let s = ProxSetup::unconstrained();
        assert_eq!(model_step(&o, &s, &[0.0], 1.0).unwrap(), v(&[2.0]));
    }

    #[test]
    fn model_step_rejects_unsupported_pair() {
        let smooth = FnOracle::new(2, |_| 0.0, |_| vec![1.0, 1.0], OracleMeta::exact(Some(0.0)));
        let o = composite_oracle(smooth, Regularizer::L1 { weight: 1.0 }).unwrap();
        let off_centre = ProxSetup::euclidean(FeasibleSet::ball(v(&[1.0, 0.0]), 1.0).unwrap());
        assert!(matches!(
            model_step(&o, &off_centre, &[1.0, 0.0], 1.0),
            Err(Error::UnsupportedCombination(_))
        ));
    }

    #[test]
    fn acceptance_examples() {
        let o = half_sq();
        let s = ProxSetup::unconstrained();
        let t = AdaptiveTriple::new(1.0, 0.0, 0.0).unwrap();
        assert!(acceptance_test(&o, &s, &[1.0], &[0.0], &t).unwrap());
        let t = AdaptiveTriple::new(0.5, 0.0, 0.0).unwrap();
        assert!(!acceptance_test(&o, &s, &[1.0], &[-1.0], &t).unwrap());
        let t = AdaptiveTriple::new(0.1, 0.3, 0.0).unwrap();
        assert!(acceptance_test(&o, &s, &[0.7], &[0.7], &t).unwrap());
    }

    #[test]
    fn first_trial_accepted_when_entering_at_twice_l() {
        let q = QuadraticOracle::isotropic(3, 1.0);
        let s = ProxSetup::unconstrained();
        let mut cfg = Algo1Config::new(v(&[1.0, -2.0, 0.5]), 2.0, 5);
        cfg.max_inner_per_iter = 50;
        let trace = algo1_run(&cfg, &q, &s).unwrap();
        assert_eq!(trace.records[0].inner_calls, 1);
        assert_eq!(trace.records[0].triple.l, 1.0);
    }

    #[test]
    fn cap_produces_diagnostic() {
        let bad = FnOracle::new(
            1,
            |x| if x[0] == 0.0 { 0.0 } else { 1e300 },
            |_| vec![1.0],
            OracleMeta::default(),
        );
        let s = ProxSetup::unconstrained();
        let mut cfg = Algo1Config::new(v(&[0.0]), 1.0, 3);
        cfg.max_inner_per_iter = 7;
        match algo1_run(&cfg, &bad, &s) {
            Err(Error::NonTermination {
                iter: 0,
                calls: 7,
                last,
            }) => assert_eq!(last.l, 32.0),
            other => panic!("expected diagnostic, got {other:?}"),
        }
    }

    #[test]
    fn joint_scaling_preserved() {
        let q = QuadraticOracle::isotropic(2, 3.0);
        let s = ProxSetup::unconstrained();
        let mut cfg = Algo1Config::new(v(&[1.0, 1.0]), 0.7, 20);
        cfg.value_err0 = 0.2;
        cfg.grad_err0 = 0.05;
        let trace = algo1_run(&cfg, &q, &s).unwrap();
        for r in &trace.records {
            assert_eq!(r.triple.value_err / r.triple.l, 0.2 / 0.7);
            assert_eq!(r.triple.grad_err / r.triple.l, 0.05 / 0.7);
        }
    }

    #[test]
    fn single_iteration_average_is_the_iterate() {
        let q = QuadraticOracle::isotropic(2, 1.0);
        let s = ProxSetup::unconstrained();
        let trace = algo1_run(&Algo1Config::new(v(&[0.3, -0.4]), 5.0, 1), &q, &s).unwrap();
        assert_eq!(trace.x_hat, trace.x_last);
        assert_eq!(trace.s_n, 1.0 / trace.records[0].triple.l);
    }

    #[test]
    fn certificate_examples() {
        let rec = |l: f64, d: f64| IterRecord {
            k: 0,
            f_point: 0.0,
            f_next: 0.0,
            triple: AdaptiveTriple {
                l,
                value_err: d,
                grad_err: 0.0,
            },
            inner_calls: 1,
            step_norm: 0.3,
            model_value: 0.0,
            divergence: 0.0,
        };
        let trace = |records: Vec<IterRecord>| Algo1Trace {
            s_n: records.iter().map(|r| 1.0 / r.triple.l).sum(),
            records,
            x_hat: Vector::zeros(1),
            x_last: Vector::zeros(1),
            total_inner_calls: 0,
            best_value: 0.0,
            best_point: Vector::zeros(1),
            iterates: None,
            stopped_early: false,
        };
        let t = trace(vec![rec(2.0, 0.1)]);
        assert!((certificate_bound(&t, 1.0, 0.0, None, 0.0).unwrap() - 2.1).abs() < 1e-15);
        // Constant L, no slack: L·R²/N.
        let t = trace(vec![rec(4.0, 0.0); 8]);
        assert_eq!(certificate_bound(&t, 2.0, 0.0, None, 0.0).unwrap(), 4.0 * 4.0 / 8.0);
        assert!(matches!(
            certificate_bound(&t, 1.0, 0.5, None, 0.0),
            Err(Error::CertificateUnavailable(_))
        ));
        assert!(matches!(
            certificate_bound(&t, 1.0, 0.5, Some(&[0.0]), 0.0),
            Err(Error::CertificateUnavailable(_))
        ));
    }

    #[test]
    fn gamma_certificate_with_iterates() {
        let q = QuadraticOracle::isotropic(2, 1.0);
        let s = ProxSetup::unconstrained();
        let mut cfg = Algo1Config::new(v(&[1.0, 1.0]), 1.0, 4);
        cfg.keep_iterates = true;
        let trace = algo1_run(&cfg, &q, &s).unwrap();
        let plain = certificate_bound(&trace, 1.0, 0.0, None, 0.0).unwrap();
        let with_gamma = certificate_bound(&trace, 1.0, 0.1, Some(&[0.0, 0.0]), 0.0).unwrap();
        assert!(with_gamma > plain);
    }

    #[test]
    fn budget_examples() {
        assert_eq!(inner_call_budget(10, 3.0, 0.1, 0.2, 3.0, 0.1, 0.2), Some(21));
        assert_eq!(inner_call_budget(5, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0), Some(10));
        assert_eq!(inner_call_budget(5, 1.0, 0.0, 0.0, 1.0, 0.1, 0.0), None);
        assert_eq!(inner_call_budget(5, 1.0, 0.5, 0.0, 1.0, 0.0, 0.0), Some(11));
    }

    #[test]
    fn early_stop_on_certificate() {
        let q = QuadraticOracle::isotropic(2, 1.0);
        let s = ProxSetup::unconstrained();
        let mut cfg = Algo1Config::new(v(&[1.0, 0.0]), 1.0, 10_000);
        cfg.radius = Some(1.0);
        cfg.epsilon = Some(1e-2);
        let trace = algo1_run(&cfg, &q, &s).unwrap();
        assert!(trace.stopped_early);
        assert!(trace.iterations() < 10_000);
        assert!(certificate_bound(&trace, 1.0, 0.0, None, 0.0).unwrap() <= 1e-2);
    }
}
