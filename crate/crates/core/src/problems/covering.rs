//! Smallest enclosing ball: `f(x) = max_k ‖x − a_k‖` over the unit ball.

use crate::error::{check_dim, Error, Result};
use crate::oracle::{ModelOracle, OracleMeta};
use crate::par;
use crate::setup::FeasibleSet;
use crate::vector::{dist, Vector};

#[derive(Clone, Debug)]
pub struct MinMaxBallProblem {
    pub points: Vec<Vector>,
    pub feasible: FeasibleSet,
    parallel: bool,
}

impl MinMaxBallProblem {
    pub fn new(points: Vec<Vector>) -> Result<Self> {
        let n = points
            .first()
            .ok_or_else(|| Error::InvalidParameter("need at least one point".into()))?
            .dim();
        for p in &points {
            check_dim(n, p.dim())?;
        }
        let parallel = n * points.len() >= par::TERM_PAR_THRESHOLD;
        Ok(Self {
            points,
            feasible: FeasibleSet::unit_ball(n),
            parallel,
        })
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    /// `max_{i<j} ‖a_i − a_j‖/2`, a lower bound on the optimal radius.
    pub fn radius_lower_bound(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.max(0.5 * dist(a, b));
            }
        }
        best
    }

    /// Exact optimum when a single point is given (it lies inside the unit ball).
    pub fn known_f_star(&self) -> Option<f64> {
        (self.points.len() == 1).then_some(0.0)
    }

    /// Index of the farthest point (lowest index on ties) and its distance.
    fn farthest(&self, x: &[f64]) -> (usize, f64) {
        let d = par::map_collect_if(self.parallel, &self.points, |a| dist(x, a));
        let mut best = (0, d[0]);
        for (i, &di) in d.iter().enumerate().skip(1) {
            if di > best.1 {
                best = (i, di);
            }
        }
        best
    }
}

/// `max_k ‖x − a_k‖`
pub fn covering_value(p: &MinMaxBallProblem, x: &[f64]) -> Result<f64> {
    check_dim(p.dim(), x.len())?;
    Ok(p.farthest(x).1)
}

/// `(x − a_j)/‖x − a_j‖` for the lowest index `j` attaining the maximum; zero
/// when `x = a_j`.
pub fn covering_subgradient(p: &MinMaxBallProblem, x: &[f64]) -> Result<Vector> {
    check_dim(p.dim(), x.len())?;
    Ok(subgradient_unchecked(p, x))
}

fn subgradient_unchecked(p: &MinMaxBallProblem, x: &[f64]) -> Vector {
    let (j, d) = p.farthest(x);
    if d == 0.0 {
        return Vector::zeros(x.len());
    }
    let inv = 1.0 / d;
    Vector::from_raw(
        x.iter()
            .zip(p.points[j].iter())
            .map(|(xi, ai)| (xi - ai) * inv)
            .collect(),
    )
}

/// Points with `0.5 < ‖a_k‖ < 1`, feasible set the unit ball.
pub fn generate_task2(n: usize, m: usize, seed: u64) -> Result<MinMaxBallProblem> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be positive".into()));
    }
    MinMaxBallProblem::new(super::shell_points(n, m, 0.5, 1.0, seed))
}

impl ModelOracle for MinMaxBallProblem {
    fn dim(&self) -> usize {
        MinMaxBallProblem::dim(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.farthest(x).1
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        subgradient_unchecked(self, x)
    }

    fn meta(&self) -> OracleMeta {
        OracleMeta {
            known_grad_err: None,
            ..OracleMeta::exact(None)
        }
    }
}
