//! Oracle conformance: finite-difference gradients, `ψ(x, x) = 0` and
//! midpoint convexity, per problem family.

use rand::Rng;

use crate::error::{Error, Result};
use crate::harness::run::Instance;
use crate::harness::spec::Task;
use crate::oracle::ModelOracle;
use crate::problems::rng;
use crate::vector::dist;

/// Largest coordinatewise `|g_i − d_i| / max(1, |g_i|, |d_i|)` between the
/// oracle gradient `g` and the central difference `d` with step `h`.
pub fn finite_diff_check<O: ModelOracle + ?Sized>(oracle: &O, x: &[f64], h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    crate::error::check_dim(oracle.dim(), x.len())?;
    let g = oracle.gradient(x);
    let mut probe = x.to_vec();
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = oracle.value(&probe);
        probe[i] = x[i] - h;
        let down = oracle.value(&probe);
        probe[i] = x[i];
        let d = (up - down) / (2.0 * h);
        let err = (g[i] - d).abs() / 1f64.max(g[i].abs()).max(d.abs());
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Conformance results for one problem family.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub task: Task,
    pub points: usize,
    pub max_fd_error: f64,
    /// Largest `|ψ(x, x)|` seen.
    pub max_model_at_point: f64,
    pub convexity_triples: usize,
    pub convexity_violations: usize,
}

impl CheckReport {
    pub fn passes(&self, fd_tol: f64) -> bool {
        self.max_fd_error < fd_tol && self.max_model_at_point == 0.0 && self.convexity_violations == 0
    }
}

fn random_point<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<f64> {
    let u = crate::problems::unit_direction(rng, n);
    let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
    u.into_iter().map(|c| r * c).collect()
}

/// Away from every kink by more than `margin` in the relevant distance.
fn differentiable(inst: &Instance, x: &[f64], margin: f64) -> bool {
    match inst {
        Instance::Task1(p) => p.centers.iter().all(|a| (dist(x, a) - p.ball_radius).abs() > margin),
        Instance::Task2(p) => {
            let mut d: Vec<f64> = p.points.iter().map(|a| dist(x, a)).collect();
            d.sort_by(|a, b| b.total_cmp(a));
            d.len() < 2 || d[0] - d[1] > margin
        }
        Instance::PlQuadratic(_) => true,
        // The ℓ1 term is not part of the gradient; the smooth part is checked.
        Instance::Composite(_) => true,
    }
}

/// Runs the suite for `task` at dimension `n` with `m` terms: finite
/// differences at `points` differentiable points, `ψ(x, x) = 0` there, and
/// midpoint convexity on `triples` random pairs.
pub fn check_family(task: Task, n: usize, m: usize, points: usize, triples: usize, seed: u64) -> Result<CheckReport> {
    let inst = Instance::generate(task, n, m, seed)?;
    let mut rng = rng(seed ^ 0x636865636b);
    let h = 1e-6;
    let margin = 1e-3;
    let mut max_fd = 0.0f64;
    let mut max_psi = 0.0f64;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < points {
        attempts += 1;
        if attempts > 100 * points {
            return Err(Error::InvalidParameter(format!(
                "could not sample {points} differentiable points for {task}"
            )));
        }
        let x = random_point(&mut rng, n, 1.0);
        if !differentiable(&inst, &x, margin) {
            continue;
        }
        accepted += 1;
        let fd = match &inst {
            Instance::Composite(c) => finite_diff_check(c.smooth(), &x, h)?,
            _ => finite_diff_check(inst.oracle(), &x, h)?,
        };
        max_fd = max_fd.max(fd);
        max_psi = max_psi.max(inst.oracle().model(&x, &x).abs());
    }
    let mut violations = 0;
    for _ in 0..triples {
        let x = random_point(&mut rng, n, 1.0);
        let y = random_point(&mut rng, n, 1.0);
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        let f = |p: &[f64]| inst.oracle().value(p);
        let (fx, fy, fm) = (f(&x), f(&y), f(&mid));
        let rhs = 0.5 * (fx + fy);
        if fm > rhs + 1e-12 * (1.0 + rhs.abs()) {
            violations += 1;
        }
    }
    Ok(CheckReport {
        task,
        points,
        max_fd_error: max_fd,
        max_model_at_point: max_psi,
        convexity_triples: triples,
        convexity_violations: violations,
    })
}

/// [`check_family`] over all four task families.
pub fn conformance_suite(n: usize, m: usize, points: usize, triples: usize, seed: u64) -> Result<Vec<CheckReport>> {
    [Task::Task1, Task::Task2, Task::PlQuadratic, Task::Composite]
        .into_iter()
        .map(|t| check_family(t, n, m, points, triples, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{FnOracle, OracleMeta};
    use crate::problems::{generate_task1, PLQuadratic};

    #[test]
    fn constant_function_has_zero_error() {
        let o = FnOracle::new(3, |_| 4.0, |_| vec![0.0; 3], OracleMeta::exact(Some(0.0)));
        assert_eq!(finite_diff_check(&o, &[1.0, 2.0, 3.0], 1e-6).unwrap(), 0.0);
        assert!(finite_diff_check(&o, &[1.0, 2.0, 3.0], 0.0).is_err());
    }

    #[test]
    fn pl_quadratic_gradient() {
        let q = PLQuadratic::random(20, 10, 1).unwrap();
        let mut r = rng(2);
        let x = random_point(&mut r, 10, 1.0);
        assert!(finite_diff_check(&q, &x, 1e-6).unwrap() < 1e-6);
    }

    #[test]
    fn ball_sum_at_smooth_point() {
        let p = generate_task1(15, 4, 3).unwrap();
        let x = vec![0.05; 15];
        assert!(finite_diff_check(&p, &x, 1e-6).unwrap() < 1e-5);
    }

    #[test]
    fn wrong_gradient_detected() {
        let o = FnOracle::new(1, |x| x[0] * x[0], |x| vec![x[0]], OracleMeta::exact(Some(2.0)));
        assert!(finite_diff_check(&o, &[1.0], 1e-6).unwrap() > 0.1);
    }

    #[test]
    fn suite_passes_on_small_instances() {
        for rep in conformance_suite(12, 4, 20, 200, 5).unwrap() {
            assert!(rep.passes(1e-5), "{rep:?}");
        }
    }
}
