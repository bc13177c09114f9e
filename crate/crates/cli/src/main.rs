use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adaptgrad::harness::{
    compare_adaptive_nonadaptive, conformance_suite, parse_config, run_experiment, run_single, set_field,
    write_cells_csv, write_compare_csv, write_factors_csv, write_table_csv, write_trace_csv, ExperimentSpec, Task,
};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

/// Full-scale dimension of the reference experiments.
const FULL_SCALE_N: usize = 100_000;

#[derive(Parser)]
#[command(name = "adaptgrad", version, about = "Adaptive gradient methods with inexact models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single run; writes the per-iteration trace CSV.
    Solve(SpecArgs),
    /// Averaged estimate over replications at each grid iteration count.
    Table1(SpecArgs),
    /// Paired adaptive vs fixed-Delta runs of the PL method.
    Compare(SpecArgs),
    /// Finite-difference and oracle conformance checks for all task families.
    Check(CheckArgs),
}

#[allow(non_snake_case)]
#[derive(Args)]
struct SpecArgs {
    /// `key = value` config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// task1, task2, pl-quadratic or composite.
    #[arg(long)]
    task: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    m: Option<String>,
    /// Iteration grid: `a..b` (step a), `a..b:step`, or `a,b,c`.
    #[arg(long)]
    iters: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// algo1, nonsmooth or algo2.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long = "L0")]
    L0: Option<String>,
    #[arg(long = "Delta0")]
    Delta0: Option<String>,
    #[arg(long = "delta0")]
    delta0: Option<String>,
    /// Injected gradient noise level.
    #[arg(long = "Delta")]
    Delta: Option<String>,
    /// Injected value noise level.
    #[arg(long = "delta")]
    delta: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long = "C")]
    C: Option<String>,
    /// sphere or adversarial.
    #[arg(long)]
    noise_mode: Option<String>,
    /// certificate or gap-lb.
    #[arg(long)]
    estimate: Option<String>,
    /// Interpret L0/Delta0 relative to the instance's true L and the noise level.
    #[arg(long)]
    relative_start: bool,
    /// Use the reference dimension n = 100000 unless --n is given.
    #[arg(long)]
    full_scale: bool,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    m: usize,
    /// Differentiable points per family.
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Random pairs for the midpoint convexity check.
    #[arg(long, default_value_t = 1000)]
    triples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Finite-difference tolerance.
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
}

impl SpecArgs {
    fn build(&self) -> Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => parse_config(path).with_context(|| format!("reading {}", path.display()))?,
            None => {
                let task: Task = match &self.task {
                    Some(t) => t.parse().map_err(anyhow::Error::msg)?,
                    None => Task::Task1,
                };
                ExperimentSpec::new(task)
            }
        };
        if self.full_scale && self.n.is_none() {
            spec.n = FULL_SCALE_N;
        }
        let overrides = [
            ("task", &self.task),
            ("n", &self.n),
            ("m", &self.m),
            ("iteration_grid", &self.iters),
            ("replications", &self.reps),
            ("seed", &self.seed),
            ("solver", &self.solver),
            ("L0", &self.L0),
            ("Delta0", &self.Delta0),
            ("delta0", &self.delta0),
            ("Delta", &self.Delta),
            ("delta", &self.delta),
            ("epsilon", &self.epsilon),
            ("C", &self.C),
            ("noise_mode", &self.noise_mode),
            ("estimate", &self.estimate),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                set_field(&mut spec, key, v).map_err(|e| anyhow::anyhow!("--{key}: {e}"))?;
            }
        }
        if self.relative_start {
            spec.relative_start = true;
        }
        spec.validate()?;
        Ok(spec)
    }

    fn out_or(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn solve(args: &SpecArgs) -> Result<()> {
    let spec = args.build()?;
    let out = args.out_or("trace.csv");
    let run = run_single(&spec, 0, true)?;
    write_trace_csv(&run.rows, &out)?;
    if let Some(last) = run.rows.last() {
        println!(
            "{} {} seed {}: {} iterations, f = {:.6e}, f_best = {:.6e}, bound = {:.6e}, {:.1} ms",
            spec.task, spec.solver, run.seed, last.iter, last.f_value, last.f_best, last.cert_bound, last.elapsed_ms
        );
    }
    if run.floor_stop {
        println!("stopped at the gradient-noise floor");
    }
    println!("trace written to {}", out.display());
    if let Some(e) = run.error {
        bail!("solver stopped: {e}");
    }
    Ok(())
}

fn table1(args: &SpecArgs) -> Result<()> {
    let spec = args.build()?;
    let out = args.out_or("table1.csv");
    let table = run_experiment(&spec)?;
    write_table_csv(&table, &out)?;
    let cells = sibling(&out, "cells");
    write_cells_csv(&table, &cells)?;
    println!(
        "{} / {} / n = {} / m = {} / {} replications, estimate = {}",
        spec.task, spec.solver, spec.n, spec.m, spec.replications, spec.estimate
    );
    println!(
        "{:>8} {:>14} {:>14} {:>14} {:>12} {:>7}",
        "iters", "estimate", "std", "f(output)", "time ms", "failed"
    );
    for r in &table.rows {
        println!(
            "{:>8} {:>14.6e} {:>14.6e} {:>14.6e} {:>12.1} {:>7}",
            r.iters,
            r.mean_estimate,
            r.std_estimate,
            r.mean_f_output,
            r.mean_time_ms,
            r.failures()
        );
    }
    println!(
        "table written to {}, per-replication cells to {}",
        out.display(),
        cells.display()
    );
    Ok(())
}

fn compare(args: &SpecArgs) -> Result<()> {
    let spec = args.build()?;
    let out = args.out_or("compare.csv");
    let table = compare_adaptive_nonadaptive(&spec)?;
    write_compare_csv(&table, &out)?;
    let factors = sibling(&out, "factors");
    write_factors_csv(&table, &factors)?;
    println!(
        "{:>8} {:>14} {:>14} {:>14} {:>14} {:>5}",
        "seed", "adaptive", "nonadaptive", "adaptive gap", "fixed gap", "dom"
    );
    for r in &table.runs {
        println!(
            "{:>8} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>5}",
            r.seed,
            r.adaptive_bound,
            r.nonadaptive_bound,
            r.adaptive_gap,
            r.fixed_gap,
            r.dominates()
        );
    }
    println!(
        "comparison written to {}, factor traces to {}",
        out.display(),
        factors.display()
    );
    Ok(())
}

fn check(args: &CheckArgs) -> Result<bool> {
    let reports = conformance_suite(args.n, args.m, args.points, args.triples, args.seed)?;
    let mut ok = true;
    for r in &reports {
        let pass = r.passes(args.tol);
        ok &= pass;
        println!(
            "{} {:<13} fd error {:.3e} over {} points, max |psi(x,x)| {:.1e}, convexity violations {}/{}",
            if pass { "PASS" } else { "FAIL" },
            r.task.name(),
            r.max_fd_error,
            r.points,
            r.max_model_at_point,
            r.convexity_violations,
            r.convexity_triples
        );
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => solve(a).map(|_| true),
        Command::Table1(a) => table1(a).map(|_| true),
        Command::Compare(a) => compare(a).map(|_| true),
        Command::Check(a) => check(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
