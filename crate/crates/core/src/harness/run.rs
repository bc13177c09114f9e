//! Experiment runner: problem instances, per-run traces, Table-1 style
//! aggregation and the paired adaptive/fixed-`Δ` comparison.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::harness::spec::{EstimateKind, ExperimentSpec, NoiseKind, SolverKind, Task};
use crate::oracle::{ModelOracle, Regularizer};
use crate::par;
use crate::problems::{
    composite_oracle, generate_task1, generate_task2, BallSumProblem, CompositeOracle, MinMaxBallProblem, NoiseMode,
    NoisyOracle, PLQuadratic, QuadraticOracle,
};
use crate::setup::{FeasibleSet, ProxSetup};
use crate::solver::{
    pl_nonadaptive_factors, pl_record_factor, Algo1, Algo1Config, Algo2, Nonsmooth, NonsmoothConfig, PLConfig,
    PLTermination, PLTrace, StepOutcome,
};
use crate::vector::Vector;

/// Mixed into the replication seed to derive the noise stream.
const NOISE_STREAM: u64 = 0x6e6f_6973_655f_7631;

/// `h = COMPOSITE_WEIGHT·‖x‖₁` for the composite task.
const COMPOSITE_WEIGHT: f64 = 0.1;

/// A generated problem with whatever reference data is known about it.
pub enum Instance {
    Task1(BallSumProblem),
    Task2(MinMaxBallProblem),
    PlQuadratic(PLQuadratic),
    Composite(CompositeOracle<QuadraticOracle>),
}

impl Instance {
    pub fn generate(task: Task, n: usize, m: usize, seed: u64) -> Result<Self> {
        Ok(match task {
            Task::Task1 => Self::Task1(generate_task1(n, m, seed)?),
            Task::Task2 => Self::Task2(generate_task2(n, m, seed)?),
            Task::PlQuadratic => Self::PlQuadratic(PLQuadratic::random(m, n, seed)?),
            Task::Composite => Self::Composite(composite_oracle(
                QuadraticOracle::random_diagonal(n, 0.1, 1.0, seed)?,
                Regularizer::L1 {
                    weight: COMPOSITE_WEIGHT,
                },
            )?),
        })
    }

    pub fn oracle(&self) -> &dyn ModelOracle {
        match self {
            Self::Task1(p) => p,
            Self::Task2(p) => p,
            Self::PlQuadratic(p) => p,
            Self::Composite(p) => p,
        }
    }

    pub fn setup(&self) -> ProxSetup {
        match self {
            Self::PlQuadratic(_) => ProxSetup::unconstrained(),
            _ => ProxSetup::euclidean(FeasibleSet::unit_ball(self.oracle().dim())),
        }
    }

    pub fn x0(&self) -> Vector {
        Vector::zeros(self.oracle().dim())
    }

    /// Best known lower bound on the optimal value.
    pub fn lower_bound(&self) -> f64 {
        match self {
            Self::Task1(_) | Self::Composite(_) => 0.0,
            Self::Task2(p) => p.radius_lower_bound(),
            Self::PlQuadratic(p) => p.f_star,
        }
    }

    pub fn f_star(&self) -> Option<f64> {
        match self {
            Self::Task1(p) => p.known_f_star,
            Self::Task2(p) => p.known_f_star(),
            Self::PlQuadratic(p) => Some(p.f_star),
            Self::Composite(_) => None,
        }
    }

    /// Smoothness constant of the differentiable part, when known.
    pub fn l(&self) -> Option<f64> {
        match self {
            Self::PlQuadratic(p) => Some(p.l),
            Self::Composite(p) => Some(p.smooth().l),
            _ => None,
        }
    }

    /// PL constant, when known.
    pub fn mu(&self) -> Option<f64> {
        match self {
            Self::PlQuadratic(p) => Some(p.mu),
            _ => None,
        }
    }
}

/// One row of the per-iteration trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub f_value: f64,
    pub f_best: f64,
    pub l_k: f64,
    pub delta_k: f64,
    pub grad_err_k: f64,
    pub inner_calls: usize,
    pub step_norm: f64,
    /// Current computable bound on the optimality gap; NaN when unavailable.
    pub cert_bound: f64,
    pub elapsed_ms: f64,
}

/// State of a run after a grid number of iterations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Snapshot {
    pub iters: usize,
    pub estimate: f64,
    /// Exact objective at the solver's output point (`x̂` for the model
    /// methods, the last iterate for the PL method).
    pub f_output: f64,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub seed: u64,
    pub rows: Vec<TraceRow>,
    pub snapshots: Vec<Snapshot>,
    /// Solver diagnostic that ended the run before the last grid point.
    pub error: Option<String>,
    /// The PL method stopped at the gradient floor.
    pub floor_stop: bool,
}

struct StepRow {
    f_value: f64,
    l: f64,
    value_err: f64,
    grad_err: f64,
    inner_calls: usize,
    step_norm: f64,
}

trait Stepper {
    /// `None` when the method has terminated on its own.
    fn step(&mut self) -> Result<Option<StepRow>>;
    /// Current computable gap bound, NaN when unavailable.
    fn bound(&self) -> f64;
    fn output(&self) -> Vector;
}

struct Algo1Stepper<'a> {
    inner: Algo1<'a, dyn ModelOracle + 'a>,
    radius_sq: f64,
}

impl Stepper for Algo1Stepper<'_> {
    fn step(&mut self) -> Result<Option<StepRow>> {
        let r = self.inner.step()?;
        Ok(Some(StepRow {
            f_value: r.f_next,
            l: r.triple.l,
            value_err: r.triple.value_err,
            grad_err: r.triple.grad_err,
            inner_calls: r.inner_calls,
            step_norm: r.step_norm,
        }))
    }

    fn bound(&self) -> f64 {
        if self.radius_sq.is_finite() {
            self.inner.certificate_with(self.radius_sq).unwrap_or(f64::NAN)
        } else {
            f64::NAN
        }
    }

    fn output(&self) -> Vector {
        self.inner.x_hat()
    }
}

struct NonsmoothStepper<'a> {
    inner: Nonsmooth<'a, dyn ModelOracle + 'a>,
    radius_sq: f64,
}

impl Stepper for NonsmoothStepper<'_> {
    fn step(&mut self) -> Result<Option<StepRow>> {
        let (r, _) = self.inner.step()?;
        Ok(Some(StepRow {
            f_value: r.f_next,
            l: r.triple.l,
            value_err: r.triple.value_err,
            grad_err: r.triple.grad_err,
            inner_calls: r.inner_calls,
            step_norm: r.step_norm,
        }))
    }

    fn bound(&self) -> f64 {
        if self.radius_sq.is_finite() {
            self.inner.certificate_with(self.radius_sq).unwrap_or(f64::NAN)
        } else {
            f64::NAN
        }
    }

    fn output(&self) -> Vector {
        self.inner.x_hat()
    }
}

struct Algo2Stepper<'a> {
    inner: Algo2<'a, dyn ModelOracle + 'a>,
    mu: Option<f64>,
    grad_err: f64,
    gap0: Option<f64>,
    product: f64,
    floor: bool,
}

impl Stepper for Algo2Stepper<'_> {
    fn step(&mut self) -> Result<Option<StepRow>> {
        if self.floor {
            return Ok(None);
        }
        if let StepOutcome::Floor = self.inner.step()? {
            self.floor = true;
            return Ok(None);
        }
        let r = *self.inner.records().last().expect("accepted step recorded");
        if let Some(mu) = self.mu {
            self.product *= pl_record_factor(&r, mu, self.grad_err)?;
        }
        Ok(Some(StepRow {
            f_value: r.f_next,
            l: r.triple.l,
            value_err: r.triple.value_err,
            grad_err: r.triple.grad_err,
            inner_calls: r.inner_calls,
            step_norm: r.step_norm,
        }))
    }

    fn bound(&self) -> f64 {
        let (Some(mu), Some(gap0)) = (self.mu, self.gap0) else {
            return f64::NAN;
        };
        let rate = self.product * gap0;
        if self.floor {
            // ‖∇f‖ ≤ g̃ + Δ ≤ 2Δ at the stopping point.
            rate.min(2.0 * self.grad_err * self.grad_err / mu)
        } else {
            rate
        }
    }

    fn output(&self) -> Vector {
        self.inner.current().clone()
    }
}

/// `(L0, Delta0)` after resolving `relative_start`.
fn start_constants(spec: &ExperimentSpec, inst: &Instance) -> Result<(f64, f64)> {
    if !spec.relative_start {
        return Ok((spec.L0, spec.Delta0));
    }
    let l = inst.l().ok_or_else(|| {
        Error::UnsupportedCombination(format!("relative_start needs a known L; {} has none", spec.task))
    })?;
    Ok((spec.L0 * l, spec.Delta0 * spec.Delta))
}

fn noise_mode(kind: NoiseKind, dim: usize) -> NoiseMode {
    match kind {
        NoiseKind::Sphere => NoiseMode::RandomSphere,
        NoiseKind::Adversarial => NoiseMode::Adversarial {
            direction: Vector::new(vec![1.0; dim]).expect("finite"),
        },
    }
}

/// The oracle the solver sees: the instance, wrapped in fresh noise when any
/// noise level is positive.
fn solver_oracle<'a>(spec: &ExperimentSpec, inst: &'a Instance, seed: u64) -> Result<Box<dyn ModelOracle + 'a>> {
    let base = inst.oracle();
    if spec.Delta == 0.0 && spec.delta == 0.0 {
        return Ok(Box::new(base));
    }
    Ok(Box::new(NoisyOracle::new(
        base,
        spec.Delta,
        spec.delta,
        noise_mode(spec.noise_mode, base.dim()),
        seed ^ NOISE_STREAM,
    )?))
}

fn make_stepper<'a>(
    spec: &ExperimentSpec,
    inst: &Instance,
    oracle: &'a (dyn ModelOracle + 'a),
    setup: &'a ProxSetup,
    iterations: usize,
) -> Result<Box<dyn Stepper + 'a>> {
    let (l0, grad_err0) = start_constants(spec, inst)?;
    let x0 = inst.x0();
    let radius_sq = setup.radius_sq_bound(&x0);
    Ok(match spec.solver {
        SolverKind::Algo1 => {
            let mut cfg = Algo1Config::new(x0, l0, iterations);
            cfg.grad_err0 = grad_err0;
            cfg.value_err0 = spec.delta0;
            Box::new(Algo1Stepper {
                inner: Algo1::new(&cfg, oracle, setup)?,
                radius_sq,
            })
        }
        SolverKind::Nonsmooth => {
            let cfg = NonsmoothConfig::new(Algo1Config::new(x0, l0, iterations), spec.epsilon, grad_err0, None);
            Box::new(NonsmoothStepper {
                inner: Nonsmooth::new(&cfg, oracle, setup)?,
                radius_sq,
            })
        }
        SolverKind::Algo2 => {
            let mut cfg = pl_config(spec, inst, x0, l0, grad_err0, iterations);
            cfg.adapt_grad_err = true;
            let gap0 = inst.f_star().map(|fs| inst.oracle().value(&cfg.x0) - fs);
            Box::new(Algo2Stepper {
                inner: Algo2::new(&cfg, oracle)?,
                mu: inst.mu(),
                grad_err: spec.Delta,
                gap0,
                product: 1.0,
                floor: false,
            })
        }
    })
}

fn pl_config(spec: &ExperimentSpec, inst: &Instance, x0: Vector, l0: f64, grad_err0: f64, n: usize) -> PLConfig {
    let mut cfg = PLConfig::new(x0, l0, n);
    cfg.grad_err0 = grad_err0;
    cfg.grad_err_cap = Some(spec.Delta);
    cfg.value_err0 = spec.delta0;
    cfg.c = spec.C;
    cfg.mu = inst.mu();
    cfg.f_star = inst.f_star();
    cfg
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Runs replication `replication` of `spec` for the largest grid value,
/// snapshotting at every grid value. Setup problems are errors; solver
/// diagnostics end the run and are reported in [`RunOutcome::error`].
pub fn run_single(spec: &ExperimentSpec, replication: usize, keep_rows: bool) -> Result<RunOutcome> {
    spec.validate()?;
    let seed = spec.seed.wrapping_add(replication as u64);
    let inst = Instance::generate(spec.task, spec.n, spec.m, seed)?;
    let oracle = solver_oracle(spec, &inst, seed)?;
    let setup = inst.setup();
    let total = spec.max_iterations();
    let mut stepper = make_stepper(spec, &inst, oracle.as_ref(), &setup, total)?;
    let lower = inst.lower_bound();

    let mut out = RunOutcome {
        seed,
        rows: Vec::new(),
        snapshots: Vec::with_capacity(spec.iteration_grid.len()),
        error: None,
        floor_stop: false,
    };
    let mut f_best = f64::INFINITY;
    let mut best_bound = f64::INFINITY;
    let mut grid = spec.iteration_grid.iter().copied().peekable();
    let mut last_output = None;
    let mut excluded = Duration::ZERO;
    let start = Instant::now();
    for k in 1..=total {
        let row = match stepper.step() {
            Ok(Some(row)) => Some(row),
            Ok(None) => {
                out.floor_stop = true;
                None
            }
            Err(e) => {
                out.error = Some(e.to_string());
                break;
            }
        };
        if let Some(row) = &row {
            f_best = f_best.min(row.f_value);
        }
        let bound = stepper.bound();
        if bound < best_bound {
            best_bound = bound;
        }
        let elapsed = ms(start.elapsed() - excluded);
        if let (true, Some(row)) = (keep_rows, &row) {
            out.rows.push(TraceRow {
                iter: k,
                f_value: row.f_value,
                f_best,
                l_k: row.l,
                delta_k: row.value_err,
                grad_err_k: row.grad_err,
                inner_calls: row.inner_calls,
                step_norm: row.step_norm,
                cert_bound: bound,
                elapsed_ms: elapsed,
            });
        }
        // A stopped PL run keeps its final state for the remaining grid points.
        while grid.peek().is_some_and(|&g| g == k || (row.is_none() && g > k)) {
            let iters = grid.next().expect("peeked");
            let pause = Instant::now();
            let f_output = *last_output.get_or_insert_with(|| inst.oracle().value(&stepper.output()));
            if row.is_some() {
                last_output = None;
            }
            let estimate = match spec.estimate {
                EstimateKind::Certificate => best_bound,
                EstimateKind::GapLb => f_best - lower,
            };
            out.snapshots.push(Snapshot {
                iters,
                estimate,
                f_output,
                elapsed_ms: elapsed,
            });
            excluded += pause.elapsed();
        }
        if row.is_none() {
            break;
        }
    }
    Ok(out)
}

/// Cell of a result table.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Ok(Snapshot),
    Failed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub iters: usize,
    pub mean_estimate: f64,
    /// Sample standard deviation (0 for a single successful cell).
    pub std_estimate: f64,
    pub mean_time_ms: f64,
    pub mean_f_output: f64,
    /// One cell per replication, in replication order.
    pub cells: Vec<Cell>,
}

impl ResultRow {
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| matches!(c, Cell::Failed(_))).count()
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.cells
            .iter()
            .filter_map(|c| match c {
                Cell::Ok(s) => Some(s.estimate),
                Cell::Failed(_) => None,
            })
            .collect()
    }
}

/// Per grid point: iteration count and each replication's `(estimate, f_output)`.
pub type TimelessRows = Vec<(usize, Vec<Option<(f64, f64)>>)>;

#[derive(Clone, Debug)]
pub struct ResultTable {
    pub spec: ExperimentSpec,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// Everything except wall times, for determinism checks.
    pub fn without_times(&self) -> TimelessRows {
        self.rows
            .iter()
            .map(|r| {
                let cells = r
                    .cells
                    .iter()
                    .map(|c| match c {
                        Cell::Ok(s) => Some((s.estimate, s.f_output)),
                        Cell::Failed(_) => None,
                    })
                    .collect();
                (r.iters, cells)
            })
            .collect()
    }

    pub fn mean_estimates(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.mean_estimate).collect()
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    if v.len() == 1 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (v.len() - 1) as f64;
    (mean, var.sqrt())
}

/// Runs every replication once up to the largest grid value, snapshotting at
/// each grid value, and averages per grid row. Replications run in parallel
/// when the `parallel` feature is on.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ResultTable> {
    run_experiment_with(spec, crate::parallel_enabled())
}

/// [`run_experiment`] with an explicit choice of parallel replications.
pub fn run_experiment_with(spec: &ExperimentSpec, parallel: bool) -> Result<ResultTable> {
    spec.validate()?;
    let reps: Vec<usize> = (0..spec.replications).collect();
    let outcomes = par::map_collect_if(parallel, &reps, |&r| run_single(spec, r, false));
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let rows = spec
        .iteration_grid
        .iter()
        .enumerate()
        .map(|(gi, &iters)| {
            let cells: Vec<Cell> = outcomes
                .iter()
                .map(|o| match o.snapshots.get(gi) {
                    Some(s) => Cell::Ok(*s),
                    None => Cell::Failed(o.error.clone().unwrap_or_else(|| "run ended early".into())),
                })
                .collect();
            let ok: Vec<&Snapshot> = cells
                .iter()
                .filter_map(|c| match c {
                    Cell::Ok(s) => Some(s),
                    Cell::Failed(_) => None,
                })
                .collect();
            let est: Vec<f64> = ok.iter().map(|s| s.estimate).collect();
            let (mean_estimate, std_estimate) = mean_std(&est);
            let (mean_time_ms, _) = mean_std(&ok.iter().map(|s| s.elapsed_ms).collect::<Vec<_>>());
            let (mean_f_output, _) = mean_std(&ok.iter().map(|s| s.f_output).collect::<Vec<_>>());
            ResultRow {
                iters,
                mean_estimate,
                std_estimate,
                mean_time_ms,
                mean_f_output,
                cells,
            }
        })
        .collect();
    Ok(ResultTable {
        spec: spec.clone(),
        rows,
    })
}

/// One seed of the adaptive-vs-fixed comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct PairedRun {
    pub seed: u64,
    /// Adaptive product bound times the initial gap.
    pub adaptive_bound: f64,
    /// Fixed-`(L, Δ)` product over the adaptive arm's gradient norms, times
    /// the initial gap.
    pub nonadaptive_bound: f64,
    /// Fixed-`(L, Δ)` product over the fixed-`Δ` arm's own gradient norms.
    pub fixed_arm_bound: f64,
    pub adaptive_gap: f64,
    pub fixed_gap: f64,
    /// Per-iteration factors of the two bounds on the adaptive trace.
    pub adaptive_factors: Vec<f64>,
    pub nonadaptive_factors: Vec<f64>,
    pub adaptive_termination: PLTermination,
    pub fixed_termination: PLTermination,
    /// Both arms produced bitwise identical traces.
    pub identical: bool,
}

impl PairedRun {
    pub fn dominates(&self) -> bool {
        self.adaptive_bound <= self.nonadaptive_bound
    }
}

#[derive(Clone, Debug)]
pub struct CompareTable {
    pub spec: ExperimentSpec,
    pub runs: Vec<PairedRun>,
}

impl CompareTable {
    pub fn all_dominate(&self) -> bool {
        self.runs.iter().all(PairedRun::dominates)
    }
}

fn traces_identical(a: &PLTrace, b: &PLTrace) -> bool {
    a.records == b.records && a.values == b.values && a.x_last == b.x_last
}

/// Adaptive-`Δ` and fixed-`Δ` runs of the PL method on one instance with
/// identically seeded noise.
pub fn paired_run(spec: &ExperimentSpec, replication: usize) -> Result<PairedRun> {
    spec.validate()?;
    let seed = spec.seed.wrapping_add(replication as u64);
    let inst = Instance::generate(spec.task, spec.n, spec.m, seed)?;
    let (Some(mu), Some(l), Some(f_star)) = (inst.mu(), inst.l(), inst.f_star()) else {
        return Err(Error::UnsupportedCombination(format!(
            "comparison needs known mu, L and f*; {} lacks them",
            spec.task
        )));
    };
    let (l0, grad_err0) = start_constants(spec, &inst)?;
    let iterations = spec.max_iterations();
    let x0 = inst.x0();
    let gap0 = inst.oracle().value(&x0) - f_star;

    let adaptive_cfg = pl_config(spec, &inst, x0.clone(), l0, grad_err0, iterations);
    let mut fixed_cfg = pl_config(spec, &inst, x0, l0, spec.Delta, iterations);
    fixed_cfg.adapt_grad_err = false;

    let run = |cfg: &PLConfig| -> Result<PLTrace> {
        let oracle = solver_oracle(spec, &inst, seed)?;
        crate::solver::algo2_run(cfg, oracle.as_ref())
    };
    let adaptive = run(&adaptive_cfg)?;
    let fixed = run(&fixed_cfg)?;

    let adaptive_factors = adaptive
        .records
        .iter()
        .map(|r| pl_record_factor(r, mu, spec.Delta))
        .collect::<Result<Vec<_>>>()?;
    let nonadaptive_factors = pl_nonadaptive_factors(&adaptive, mu, l, spec.Delta)?;
    let fixed_factors = pl_nonadaptive_factors(&fixed, mu, l, spec.Delta)?;
    let gap_of = |t: &PLTrace| inst.oracle().value(&t.x_last) - f_star;
    Ok(PairedRun {
        seed,
        adaptive_bound: adaptive_factors.iter().product::<f64>() * gap0,
        nonadaptive_bound: nonadaptive_factors.iter().product::<f64>() * gap0,
        fixed_arm_bound: fixed_factors.iter().product::<f64>() * gap0,
        adaptive_gap: gap_of(&adaptive),
        fixed_gap: gap_of(&fixed),
        adaptive_factors,
        nonadaptive_factors,
        adaptive_termination: adaptive.termination,
        fixed_termination: fixed.termination,
        identical: traces_identical(&adaptive, &fixed),
    })
}

/// Paired runs over all replications (`solver` must be `algo2`).
pub fn compare_adaptive_nonadaptive(spec: &ExperimentSpec) -> Result<CompareTable> {
    spec.validate()?;
    if spec.solver != SolverKind::Algo2 {
        return Err(Error::UnsupportedCombination("comparison needs solver = algo2".into()));
    }
    let reps: Vec<usize> = (0..spec.replications).collect();
    let runs = par::map_collect(&reps, |&r| paired_run(spec, r))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(CompareTable {
        spec: spec.clone(),
        runs,
    })
}
