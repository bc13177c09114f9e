//! Experiment specification and its line-based `key = value` config format.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    /// Sum of distances to unit balls over the unit ball.
    Task1,
    /// Smallest enclosing ball over the unit ball.
    Task2,
    /// `½‖Ax − b‖²` with an `m × n` Gaussian `A`, unconstrained.
    PlQuadratic,
    /// Random strongly convex quadratic plus `0.1‖x‖₁` over the unit ball.
    Composite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    /// Adaptive model method with the jointly tuned triple `(L, δ, Δ)`.
    Algo1,
    /// Restart variant with `Δ` fixed at `Delta0`.
    Nonsmooth,
    /// PL gradient method.
    Algo2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    Sphere,
    Adversarial,
}

/// What the `estimate` column of a result table reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateKind {
    /// Best computable upper bound on `f(x̂) − f*` seen so far: the running
    /// minimum of the accuracy certificate (model methods), or the product
    /// rate bound times the initial gap (PL method).
    Certificate,
    /// `f(x_best) − f_LB` with `x_best` the best iterate so far and `f_LB` the
    /// best known lower bound on the optimum.
    GapLb,
}

macro_rules! keyword_enum {
    ($ty:ident { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub const NAMES: &'static [&'static str] = &[$($name),+];

            pub fn name(self) -> &'static str {
                match self {
                    $($ty::$variant => $name),+
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    _ => Err(format!("expected one of {}, got {s:?}", Self::NAMES.join(", "))),
                }
            }
        }
    };
}

keyword_enum!(Task { Task1 => "task1", Task2 => "task2", PlQuadratic => "pl-quadratic", Composite => "composite" });
keyword_enum!(SolverKind { Algo1 => "algo1", Nonsmooth => "nonsmooth", Algo2 => "algo2" });
keyword_enum!(NoiseKind { Sphere => "sphere", Adversarial => "adversarial" });
keyword_enum!(EstimateKind { Certificate => "certificate", GapLb => "gap-lb" });

/// Field names double as config keys.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub task: Task,
    pub n: usize,
    /// Number of centres/points, or rows of `A` for `pl-quadratic`.
    pub m: usize,
    pub iteration_grid: Vec<usize>,
    pub replications: usize,
    /// Replication `r` uses seed `seed + r`.
    pub seed: u64,
    pub solver: SolverKind,
    pub L0: f64,
    /// Starting `Δ` (adaptive solvers) or the fixed `Δ` (nonsmooth).
    pub Delta0: f64,
    pub delta0: f64,
    /// Target accuracy of the nonsmooth restart rule.
    pub epsilon: f64,
    /// Reporting constant of the PL rate/floor dichotomy.
    pub C: f64,
    /// Injected gradient noise level.
    pub Delta: f64,
    /// Injected value noise level.
    pub delta: f64,
    pub noise_mode: NoiseKind,
    pub estimate: EstimateKind,
    /// Read `L0` and `Delta0` as multiples of the instance's true `L` and of
    /// the injected `Delta` (only for tasks with a known `L`).
    pub relative_start: bool,
}

pub const REQUIRED_KEYS: &[&str] = &["task"];

impl ExperimentSpec {
    /// Desk-scale defaults for `task`.
    pub fn new(task: Task) -> Self {
        let solver = match task {
            Task::PlQuadratic => SolverKind::Algo2,
            _ => SolverKind::Algo1,
        };
        Self {
            task,
            n: 1000,
            m: 10,
            iteration_grid: vec![200, 400, 600, 800, 1000],
            replications: 10,
            seed: 0,
            solver,
            L0: 1.0,
            Delta0: 0.01,
            delta0: 0.0,
            epsilon: 0.01,
            C: 2.0,
            Delta: 0.0,
            delta: 0.0,
            noise_mode: NoiseKind::Sphere,
            estimate: EstimateKind::Certificate,
            relative_start: false,
        }
    }

    pub fn max_iterations(&self) -> usize {
        self.iteration_grid.last().copied().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n == 0 || self.m == 0 {
            return bad("n and m must be positive".into());
        }
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.iteration_grid.is_empty() || self.iteration_grid[0] == 0 {
            return bad("iteration grid must be nonempty with positive entries".into());
        }
        if self.iteration_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("iteration grid must be strictly increasing".into());
        }
        if !(self.L0 > 0.0 && self.L0.is_finite()) {
            return bad(format!("L0 must be positive, got {}", self.L0));
        }
        for (name, v) in [
            ("Delta0", self.Delta0),
            ("delta0", self.delta0),
            ("Delta", self.Delta),
            ("delta", self.delta),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.C > 1.0) {
            return bad(format!("C must exceed 1, got {}", self.C));
        }
        match (self.solver, self.task) {
            (SolverKind::Algo2, Task::PlQuadratic) => {}
            (SolverKind::Algo2, t) => {
                return Err(Error::UnsupportedCombination(format!(
                    "algo2 is unconstrained and needs a smooth task; {t} is not supported"
                )))
            }
            (SolverKind::Nonsmooth, _) if self.delta > 0.0 => {
                return Err(Error::UnsupportedCombination(
                    "nonsmooth solver needs exact values (delta = 0)".into(),
                ))
            }
            _ => {}
        }
        if self.relative_start && !matches!(self.task, Task::PlQuadratic | Task::Composite) {
            return Err(Error::UnsupportedCombination(format!(
                "relative_start needs a task with known L; {} has none",
                self.task
            )));
        }
        if self.estimate == EstimateKind::Certificate
            && self.task == Task::PlQuadratic
            && self.solver != SolverKind::Algo2
        {
            return Err(Error::UnsupportedCombination(
                "certificate estimate needs a bounded feasible set".into(),
            ));
        }
        Ok(())
    }

    /// Config text accepted by [`parse_config_str`], every field spelled out.
    pub fn to_config_string(&self) -> String {
        let grid: Vec<String> = self.iteration_grid.iter().map(|n| n.to_string()).collect();
        format!(
            "task = {}\nn = {}\nm = {}\niteration_grid = {}\nreplications = {}\nseed = {}\nsolver = {}\n\
             L0 = {}\nDelta0 = {}\ndelta0 = {}\nepsilon = {}\nC = {}\nDelta = {}\ndelta = {}\n\
             noise_mode = {}\nestimate = {}\nrelative_start = {}\n",
            self.task,
            self.n,
            self.m,
            grid.join(","),
            self.replications,
            self.seed,
            self.solver,
            self.L0,
            self.Delta0,
            self.delta0,
            self.epsilon,
            self.C,
            self.Delta,
            self.delta,
            self.noise_mode,
            self.estimate,
            self.relative_start,
        )
    }
}

/// `a..b` (step `a`), `a..b:s`, or a comma-separated list.
pub fn parse_grid(s: &str) -> std::result::Result<Vec<usize>, String> {
    let s = s.trim();
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad iteration count {:?}: {e}", t.trim()))
    };
    let grid = if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (num(hi)?, num(step)?),
            None => (num(rest)?, num(lo)?),
        };
        let lo = num(lo)?;
        if step == 0 || lo == 0 || hi < lo {
            return Err(format!("empty or invalid range {s:?}"));
        }
        (lo..=hi).step_by(step).collect()
    } else {
        s.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>()?
    };
    if grid.is_empty() {
        return Err("empty iteration grid".into());
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("grid {s:?} is not strictly increasing"));
    }
    Ok(grid)
}

fn parse_value<T: FromStr>(v: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("{v:?}: {e}"))
}

/// Sets one field from its textual value.
pub fn set_field(spec: &mut ExperimentSpec, key: &str, value: &str) -> std::result::Result<(), String> {
    let v = value.trim();
    match key {
        "task" => spec.task = v.parse()?,
        "n" => spec.n = parse_value(v)?,
        "m" => spec.m = parse_value(v)?,
        "iteration_grid" => spec.iteration_grid = parse_grid(v)?,
        "replications" => spec.replications = parse_value(v)?,
        "seed" => spec.seed = parse_value(v)?,
        "solver" => spec.solver = v.parse()?,
        "L0" => spec.L0 = parse_value(v)?,
        "Delta0" => spec.Delta0 = parse_value(v)?,
        "delta0" => spec.delta0 = parse_value(v)?,
        "epsilon" => spec.epsilon = parse_value(v)?,
        "C" => spec.C = parse_value(v)?,
        "Delta" => spec.Delta = parse_value(v)?,
        "delta" => spec.delta = parse_value(v)?,
        "noise_mode" => spec.noise_mode = v.parse()?,
        "estimate" => spec.estimate = v.parse()?,
        "relative_start" => spec.relative_start = parse_value(v)?,
        _ => return Err(format!("unknown key {key:?}")),
    }
    Ok(())
}

/// Parses config text: `key = value` lines, `#` starts a comment. Only
/// `task` is required; it fixes the defaults the other keys override.
pub fn parse_config_str(text: &str) -> Result<ExperimentSpec> {
    let mut entries: Vec<(usize, &str, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            line: line_no,
            msg: format!("expected `key = value`, got {line:?}"),
        })?;
        let key = key.trim();
        if let Some((prev, _, _)) = entries.iter().find(|(_, k, _)| *k == key) {
            return Err(Error::Config {
                line: line_no,
                msg: format!("duplicate key {key:?} (first set on line {prev})"),
            });
        }
        entries.push((line_no, key, value));
    }
    let (task_line, _, task_value) = entries
        .iter()
        .find(|(_, k, _)| *k == "task")
        .ok_or_else(|| Error::Config {
            line: 0,
            msg: "missing required key \"task\"".into(),
        })?;
    let task: Task = task_value
        .trim()
        .parse()
        .map_err(|msg| Error::Config { line: *task_line, msg })?;
    let mut spec = ExperimentSpec::new(task);
    for (line, key, value) in entries {
        set_field(&mut spec, key, value).map_err(|msg| Error::Config { line, msg })?;
    }
    spec.validate()?;
    Ok(spec)
}

pub fn parse_config(path: &Path) -> Result<ExperimentSpec> {
    parse_config_str(&fs::read_to_string(path)?)
}

pub fn write_config(spec: &ExperimentSpec, path: &Path) -> Result<()> {
    let text = spec.to_config_string();
    super::csvio::atomic_write(path, |w| Ok(w.write_all(text.as_bytes())?))
}
