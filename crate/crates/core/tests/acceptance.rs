//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::Instant;

use adaptgrad::harness::{
    compare_adaptive_nonadaptive, conformance_suite, run_experiment, ExperimentSpec, SolverKind, Task,
};
use adaptgrad::problems::{generate_task2, MinMaxBallProblem, NoiseMode, NoisyOracle, PLQuadratic, QuadraticOracle};
use adaptgrad::solver::{
    algo1_run, algo2_run, certificate_bound, inner_call_budget, nonsmooth_run, p_bound, pl_dichotomy_check,
    Algo1Config, DichotomyBranch, NonsmoothConfig, PLConfig, PLTrace,
};
use adaptgrad::vector::{dist, dot_diff, norm_sq};
use adaptgrad::{project_ball, FeasibleSet, ModelOracle, ProxSetup, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vector {
    Vector::new((0..n).map(|_| rng.random_range(-scale..scale)).collect()).unwrap()
}

// ---------------------------------------------------------------- criterion 1

fn table_shape(task: Task, lo: f64, hi: f64) -> (bool, String) {
    let mut spec = ExperimentSpec::new(task);
    spec.n = 1000;
    spec.m = 10;
    spec.replications = 10;
    spec.iteration_grid = vec![200, 400, 600, 800, 1000];
    let start = Instant::now();
    let table = match run_experiment(&spec) {
        Ok(t) => t,
        Err(e) => return (false, format!("{task}: {e}")),
    };
    let secs = start.elapsed().as_secs_f64();
    let est = table.mean_estimates();
    let failures: usize = table.rows.iter().map(|r| r.failures()).sum();
    let decreasing = est.windows(2).all(|w| w[1] < w[0]);
    let ratio = est[est.len() - 1] / est[0];
    let pass = failures == 0 && decreasing && (lo..=hi).contains(&ratio) && secs < 180.0;
    let shown: Vec<String> = est.iter().map(|e| format!("{e:.4}")).collect();
    (
        pass,
        format!(
            "{task}: [{}] ratio {ratio:.3} in [{lo}, {hi}], strictly decreasing {decreasing}, failed cells {failures}, {secs:.1} s",
            shown.join(", ")
        ),
    )
}

fn criterion1() -> Outcome {
    let (p1, d1) = table_shape(Task::Task1, 0.12, 0.40);
    let (p2, d2) = table_shape(Task::Task2, 0.15, 0.45);
    outcome(p1 && p2, format!("{d1}; {d2}"))
}

// ---------------------------------------------------------------- criterion 2

/// Textbook adaptive projected gradient: halve `L`, then double until the
/// quadratic upper bound holds at the projected step.
fn reference_projected_gradient(q: &QuadraticOracle, x0: &Vector, l0: f64, radius: f64, iters: usize) -> Vec<Vector> {
    let center = vec![0.0; x0.dim()];
    let mut x = x0.clone();
    let mut l = l0;
    let mut out = Vec::with_capacity(iters);
    for _ in 0..iters {
        let g = q.gradient(&x);
        let fx = q.value(&x);
        l /= 2.0;
        let y = loop {
            let z: Vec<f64> = x.iter().zip(g.iter()).map(|(xi, gi)| xi - gi / l).collect();
            let y = project_ball(&z, &center, radius).unwrap();
            let upper = fx + dot_diff(&g, &y, &x) + 0.5 * l * dist(&y, &x).powi(2);
            if q.value(&y) <= upper {
                break y;
            }
            l *= 2.0;
        };
        x = y;
        out.push(x.clone());
    }
    out
}

fn criterion2() -> Outcome {
    let n = 10;
    let iters = 100;
    let radius = 1.0;
    let mut worst = 0.0f64;
    for seed in 0..5u64 {
        let q = QuadraticOracle::random(n, 0.1, 100 + seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0 = project_ball(&random_vec(&mut rng, n, 1.0), &vec![0.0; n], radius).unwrap();
        let setup = ProxSetup::euclidean(FeasibleSet::unit_ball(n));
        let mut cfg = Algo1Config::new(x0.clone(), 1.0, iters);
        cfg.keep_iterates = true;
        let trace = match algo1_run(&cfg, &q, &setup) {
            Ok(t) => t,
            Err(e) => return outcome(false, format!("seed {seed}: {e}")),
        };
        let ours = trace.iterates.expect("iterates kept");
        let reference = reference_projected_gradient(&q, &x0, 1.0, radius, iters);
        for (a, b) in ours[1..].iter().zip(&reference) {
            for (ai, bi) in a.iter().zip(b.iter()) {
                worst = worst.max((ai - bi).abs());
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max coordinate difference {worst:.2e} over 5 quadratics x {iters} iterations (tol 1e-10)"),
    )
}

// ---------------------------------------------------------------- criterion 3

fn criterion3() -> Outcome {
    let n = 10;
    let iters = 100;
    let mut worst_slack = i64::MAX;
    let mut bad = Vec::new();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let q = QuadraticOracle::random(n, 0.05, 200 + seed);
        let l = q.l;
        let grad_err = rng.random_range(0.001..0.5);
        let value_err = rng.random_range(0.0001..0.05);
        let o = NoisyOracle::new(q, grad_err, value_err, NoiseMode::RandomSphere, seed).unwrap();
        let mut cfg = Algo1Config::new(
            random_vec(&mut rng, n, 2.0),
            l * 2f64.powf(rng.random_range(-8.0..4.0)),
            iters,
        );
        cfg.grad_err0 = grad_err * 2f64.powf(rng.random_range(-8.0..4.0));
        cfg.value_err0 = value_err * 2f64.powf(rng.random_range(-8.0..4.0));
        let trace = match algo1_run(&cfg, &o, &ProxSetup::unconstrained()) {
            Ok(t) => t,
            Err(e) => {
                bad.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let budget = inner_call_budget(iters, cfg.l0, cfg.value_err0, cfg.grad_err0, l, value_err, grad_err)
            .expect("all starting estimates positive");
        let used = trace.total_inner_calls as u64;
        worst_slack = worst_slack.min(budget as i64 - used as i64);
        if used > budget {
            bad.push(format!("seed {seed}: {used} > {budget}"));
        }
    }
    outcome(
        bad.is_empty(),
        format!("20 noisy quadratic runs, N = {iters}; smallest budget slack {worst_slack}; violations {bad:?}"),
    )
}

// ---------------------------------------------------------------- criterion 4

fn criterion4() -> Outcome {
    let mut bad = Vec::new();
    let mut worst_ratio = 0.0f64;
    let mut runs = 0;
    for seed in 0..25u64 {
        // Unconstrained quadratic, f* = 0 at the known minimiser.
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + seed);
        let n = 8;
        let q = QuadraticOracle::random(n, 0.01, 300 + seed);
        let x0 = random_vec(&mut rng, n, 3.0);
        let radius = (0.5 * dist(q.minimizer(), &x0).powi(2)).sqrt();
        let iters = rng.random_range(5..150);
        let cfg = Algo1Config::new(x0, rng.random_range(0.01..100.0), iters);
        let trace = algo1_run(&cfg, &q, &ProxSetup::unconstrained()).unwrap();
        let cert = certificate_bound(&trace, radius, 0.0, None, 0.0).unwrap();
        let gap = q.value(&trace.x_hat);
        runs += 1;
        worst_ratio = worst_ratio.max(gap / cert);
        if gap > cert + 1e-12 * cert.max(1.0) {
            bad.push(format!("quadratic seed {seed}: gap {gap:e} > cert {cert:e}"));
        }

        // Covering ball with a single point: f* = 0 at that point.
        let p = generate_task2(50, 1, 500 + seed).unwrap();
        let a = p.points[0].clone();
        let x0 = Vector::zeros(50);
        let radius = (0.5 * norm_sq(&a)).sqrt();
        let mut cfg = Algo1Config::new(x0, 1.0, rng.random_range(5..300));
        cfg.grad_err0 = 0.01;
        let setup = ProxSetup::euclidean(FeasibleSet::unit_ball(50));
        let trace = algo1_run(&cfg, &p, &setup).unwrap();
        let cert = certificate_bound(&trace, radius, 0.0, None, 0.0).unwrap();
        let gap = p.value(&trace.x_hat);
        runs += 1;
        worst_ratio = worst_ratio.max(gap / cert);
        if gap > cert + 1e-12 * cert.max(1.0) {
            bad.push(format!("covering seed {seed}: gap {gap:e} > cert {cert:e}"));
        }
    }
    outcome(
        bad.is_empty() && runs == 50,
        format!("{runs} runs, max gap/certificate {worst_ratio:.3}; violations {bad:?}"),
    )
}

// ---------------------------------------------------------------- criterion 5

fn pl_instances() -> Vec<(String, PLQuadratic)> {
    let mut out = Vec::new();
    for seed in 0..4u64 {
        out.push((
            format!("wide 20x50 seed {seed}"),
            PLQuadratic::random(20, 50, 600 + seed).unwrap(),
        ));
        out.push((
            format!("tall 60x15 seed {seed}"),
            PLQuadratic::random(60, 15, 700 + seed).unwrap(),
        ));
        out.push((
            format!("rank-4 30x12 seed {seed}"),
            PLQuadratic::random_low_rank(30, 12, 4, 800 + seed).unwrap(),
        ));
    }
    out
}

fn criterion5(pl_traces: &mut Vec<PLTrace>) -> Outcome {
    let iters = 200;
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    let mut rank_deficient_seen = false;
    let mut floor_hits = 0;
    for (name, q) in pl_instances() {
        rank_deficient_seen |= name.starts_with("rank");
        let x0 = Vector::zeros(q.a.ncols());
        let mut cfg = PLConfig::new(x0.clone(), 2.0 * q.l, iters);
        cfg.keep_iterates = true;
        let trace = match algo2_run(&cfg, &q) {
            Ok(t) => t,
            Err(e) => {
                bad.push(format!("{name}: {e}"));
                continue;
            }
        };
        let gap0 = q.gap(&x0);
        let rate = 1.0 - q.mu / q.l;
        for (k, x) in trace.iterates.as_ref().expect("iterates kept").iter().enumerate() {
            let bound = rate.powi(k as i32) * gap0;
            let gap = q.gap(x);
            // Acceptance decisions compare values carrying ε·|f*| rounding.
            let roundoff = 1e-12 * q.f_star.max(1.0);
            if bound > roundoff {
                worst = worst.max(gap / bound);
            }
            if gap > bound * (1.0 + 1e-9) {
                floor_hits += 1;
            }
            if gap > bound * (1.0 + 1e-9) + roundoff {
                bad.push(format!("{name} k = {k}: gap {gap:e} > {bound:e}"));
                break;
            }
        }
        pl_traces.push(trace);
    }
    outcome(
        bad.is_empty() && rank_deficient_seen,
        format!(
            "12 least-squares instances (4 rank-deficient), N <= {iters}; max gap/bound {worst:.3}; \
             {floor_hits} checks within value roundoff only; violations {bad:?}"
        ),
    )
}

// ---------------------------------------------------------------- criterion 6

fn criterion6(pl_traces: &mut Vec<PLTrace>) -> Outcome {
    let c = 3.0;
    let iters = 200;
    let mut linear = 0;
    let mut floor = 0;
    let mut bad = Vec::new();
    for grad_err in [0.01, 0.1] {
        for seed in 0..20u64 {
            let q = PLQuadratic::random(20, 50, 900 + seed).unwrap();
            let x0 = Vector::zeros(50);
            let mut cfg = PLConfig::new(x0.clone(), 2.0 * q.l, iters);
            cfg.grad_err0 = 2.0 * grad_err;
            cfg.grad_err_cap = Some(grad_err);
            cfg.c = c;
            let o = NoisyOracle::new(&q, grad_err, 0.0, NoiseMode::RandomSphere, seed).unwrap();
            let trace = match algo2_run(&cfg, &o) {
                Ok(t) => t,
                Err(e) => {
                    bad.push(format!("Delta {grad_err} seed {seed}: {e}"));
                    continue;
                }
            };
            let gap0 = q.value(&x0) - q.f_star;
            let report = pl_dichotomy_check(&trace, q.mu, q.l, grad_err, c, gap0);
            match report.branch {
                DichotomyBranch::Linear { bound } => {
                    let gap = trace.values.last().unwrap() - q.f_star;
                    if gap <= bound * (1.0 + 1e-9) {
                        linear += 1;
                    } else {
                        bad.push(format!("Delta {grad_err} seed {seed}: linear gap {gap:e} > {bound:e}"));
                    }
                }
                DichotomyBranch::Floor { bound, .. } => {
                    let best = trace.values.iter().cloned().fold(f64::INFINITY, f64::min) - q.f_star;
                    if best < bound {
                        floor += 1;
                    } else {
                        bad.push(format!("Delta {grad_err} seed {seed}: floor gap {best:e} >= {bound:e}"));
                    }
                }
            }
            pl_traces.push(trace);
        }
    }
    outcome(
        bad.is_empty() && linear + floor == 40,
        format!("40 noisy runs (C = {c}): {linear} linear-branch, {floor} floor-branch, unexplained {bad:?}"),
    )
}

// ---------------------------------------------------------------- criterion 7

fn criterion7() -> Outcome {
    let grad_err = 2.0;
    let l_known = 1.0;
    let epsilon = 0.05;
    let bound = p_bound(grad_err, epsilon, l_known);
    let mut max_p = 0;
    let mut iterations = 0;
    let mut bad = Vec::new();
    for seed in 0..10u64 {
        let p: MinMaxBallProblem = generate_task2(1000, 10, seed).unwrap();
        let setup = ProxSetup::euclidean(FeasibleSet::unit_ball(1000));
        let base = Algo1Config::new(Vector::zeros(1000), 1.0, 200);
        let cfg = NonsmoothConfig::new(base, epsilon, grad_err, Some(l_known));
        match nonsmooth_run(&cfg, &p, &setup) {
            Ok(t) => {
                for r in &t.restarts {
                    iterations += 1;
                    max_p = max_p.max(r.p_used);
                    if r.p_used > bound {
                        bad.push(format!("seed {seed} k = {}: p = {} > {bound}", r.k, r.p_used));
                    }
                }
            }
            Err(e) => bad.push(format!("seed {seed}: {e}")),
        }
    }
    outcome(
        bad.is_empty() && iterations == 2000,
        format!("{iterations} outer iterations over 10 task2 instances; max doublings {max_p} <= p_bound {bound}; violations {bad:?}"),
    )
}

// ---------------------------------------------------------------- criterion 8

fn criterion8(pl_traces: &[PLTrace]) -> Outcome {
    let mut steps = 0;
    let mut worst = f64::INFINITY;
    let mut bad = 0;
    for t in pl_traces {
        for r in &t.records {
            steps += 1;
            let need = (r.g_tilde - r.triple.grad_err).powi(2) / (2.0 * r.triple.l);
            let got = r.f_point - r.f_next;
            let tol = 1e-12 * r.f_point.abs().max(1.0);
            worst = worst.min(got - need);
            if got < need - tol {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0 && steps > 0,
        format!(
            "{steps} accepted steps over {} runs; min (decrease - required) {worst:.2e}; violations {bad}",
            pl_traces.len()
        ),
    )
}

// ---------------------------------------------------------------- criterion 9

fn criterion9() -> Outcome {
    match conformance_suite(20, 10, 100, 1000, 7) {
        Ok(reports) => {
            let pass = reports.iter().all(|r| r.max_fd_error < 1e-5);
            let shown: Vec<String> = reports
                .iter()
                .map(|r| format!("{} {:.2e}", r.task, r.max_fd_error))
                .collect();
            outcome(
                pass,
                format!(
                    "max relative fd error at 100 points each: {} (tol 1e-5)",
                    shown.join(", ")
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

// --------------------------------------------------------------- criterion 10

fn criterion10(pl_traces: &mut Vec<PLTrace>) -> Outcome {
    let mut spec = ExperimentSpec::new(Task::PlQuadratic);
    spec.solver = SolverKind::Algo2;
    spec.n = 50;
    spec.m = 20;
    spec.iteration_grid = vec![200];
    spec.replications = 20;
    spec.seed = 1200;
    spec.relative_start = true;
    spec.L0 = 2.0;
    spec.Delta0 = 2.0;
    let mut total = 0;
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for grad_err in [0.01, 0.1] {
        spec.Delta = grad_err;
        match compare_adaptive_nonadaptive(&spec) {
            Ok(t) => {
                for r in &t.runs {
                    total += 1;
                    worst = worst.max(r.adaptive_bound / r.nonadaptive_bound);
                    if !r.dominates() {
                        bad.push(format!("Delta {grad_err} seed {}", r.seed));
                    }
                }
            }
            Err(e) => bad.push(format!("Delta {grad_err}: {e}")),
        }
    }
    // Re-run one noisy pair's adaptive arm for the descent check.
    let q = PLQuadratic::random(20, 50, 1200).unwrap();
    let mut cfg = PLConfig::new(Vector::zeros(50), 2.0 * q.l, 200);
    cfg.grad_err0 = 0.2;
    cfg.grad_err_cap = Some(0.1);
    let o = NoisyOracle::new(&q, 0.1, 0.0, NoiseMode::RandomSphere, 1).unwrap();
    if let Ok(t) = algo2_run(&cfg, &o) {
        pl_traces.push(t);
    }
    spec.Delta = 0.0;
    let identical = compare_adaptive_nonadaptive(&spec).map(|t| t.runs.iter().all(|r| r.identical));
    let identical = matches!(identical, Ok(true));
    outcome(
        bad.is_empty() && total == 40 && identical,
        format!("{total} paired seeds; max adaptive/nonadaptive {worst:.3}; Delta = 0 arms identical {identical}; violations {bad:?}"),
    )
}

fn main() -> ExitCode {
    let mut pl_traces = Vec::new();
    let results: Vec<(usize, Outcome)> = vec![
        (1, criterion1()),
        (2, criterion2()),
        (3, criterion3()),
        (4, criterion4()),
        (5, criterion5(&mut pl_traces)),
        (6, criterion6(&mut pl_traces)),
        (7, criterion7()),
        (10, criterion10(&mut pl_traces)),
        (9, criterion9()),
    ];
    let mut results = results;
    results.push((8, criterion8(&pl_traces)));
    results.sort_by_key(|(i, _)| *i);
    let mut failed = 0;
    for (i, o) in &results {
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {i}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
