//! `f(x) = Σ_k max(‖x − a_k‖ − 1, 0)` over the unit ball: the total distance
//! from `x` to `m` unit balls.

use crate::error::{check_dim, Error, Result};
use crate::oracle::{ModelOracle, OracleMeta};
use crate::par;
use crate::setup::FeasibleSet;
use crate::vector::{dist, Vector};

#[derive(Clone, Debug)]
pub struct BallSumProblem {
    pub centers: Vec<Vector>,
    pub ball_radius: f64,
    pub feasible: FeasibleSet,
    pub known_f_star: Option<f64>,
    parallel: bool,
}

impl BallSumProblem {
    pub fn new(centers: Vec<Vector>, ball_radius: f64) -> Result<Self> {
        let n = centers
            .first()
            .ok_or_else(|| Error::InvalidParameter("need at least one centre".into()))?
            .dim();
        for c in &centers {
            check_dim(n, c.dim())?;
        }
        if !(ball_radius >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be nonnegative, got {ball_radius}"
            )));
        }
        let parallel = n * centers.len() >= par::TERM_PAR_THRESHOLD;
        Ok(Self {
            centers,
            ball_radius,
            feasible: FeasibleSet::unit_ball(n),
            known_f_star: None,
            parallel,
        })
    }

    pub fn dim(&self) -> usize {
        self.centers[0].dim()
    }

    /// Forces term evaluation to run sequentially or (feature permitting) in parallel.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    fn distances(&self, x: &[f64]) -> Vec<f64> {
        par::map_collect_if(self.parallel, &self.centers, |a| dist(x, a))
    }
}

/// `Σ_k max(‖x − a_k‖ − r, 0)`
pub fn fts_value(p: &BallSumProblem, x: &[f64]) -> Result<f64> {
    check_dim(p.dim(), x.len())?;
    Ok(value_unchecked(p, x))
}

fn value_unchecked(p: &BallSumProblem, x: &[f64]) -> f64 {
    p.distances(x).into_iter().map(|d| (d - p.ball_radius).max(0.0)).sum()
}

/// `Σ_{k active} (x − a_k)/‖x − a_k‖`, where a term is active when `‖x − a_k‖ > r`.
pub fn fts_subgradient(p: &BallSumProblem, x: &[f64]) -> Result<Vector> {
    check_dim(p.dim(), x.len())?;
    Ok(subgradient_unchecked(p, x))
}

fn subgradient_unchecked(p: &BallSumProblem, x: &[f64]) -> Vector {
    let active: Vec<(&Vector, f64)> = p
        .centers
        .iter()
        .zip(p.distances(x))
        .filter(|(_, d)| *d > p.ball_radius)
        .map(|(a, d)| (a, 1.0 / d))
        .collect();
    let mut g = vec![0.0; x.len()];
    par::fill_chunks(p.parallel, &mut g, |off, chunk| {
        for (a, w) in &active {
            let a = &a[off..off + chunk.len()];
            let xs = &x[off..off + chunk.len()];
            for ((gi, xi), ai) in chunk.iter_mut().zip(xs).zip(a) {
                *gi += w * (xi - ai);
            }
        }
    });
    Vector::from_raw(g)
}

/// Centres `a_k` with `1 < ‖a_k‖ < 1.5`, unit balls, feasible set the unit ball.
pub fn generate_task1(n: usize, m: usize, seed: u64) -> Result<BallSumProblem> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be positive".into()));
    }
    BallSumProblem::new(super::shell_points(n, m, 1.0, 1.5, seed), 1.0)
}

impl ModelOracle for BallSumProblem {
    fn dim(&self) -> usize {
        BallSumProblem::dim(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        value_unchecked(self, x)
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::norm;

    fn single(a: &[f64]) -> BallSumProblem {
        BallSumProblem::new(vec![Vector::new(a.to_vec()).unwrap()], 1.0).unwrap()
    }

    #[test]
    fn value_examples() {
        assert_eq!(fts_value(&single(&[2.0, 0.0]), &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(fts_value(&single(&[2.0, 0.0]), &[1.5, 0.0]).unwrap(), 0.0);
        assert!(fts_value(&single(&[2.0, 0.0]), &[1.5]).is_err());
    }

    #[test]
    fn subgradient_examples() {
        assert_eq!(
            fts_subgradient(&single(&[2.0, 0.0]), &[0.0, 0.0]).unwrap().as_slice(),
            &[-1.0, 0.0]
        );
        assert_eq!(
            fts_subgradient(&single(&[2.0, 0.0]), &[1.5, 0.2]).unwrap().as_slice(),
            &[0.0, 0.0]
        );
    }

    #[test]
    fn value_matches_term_by_term() {
        let p = generate_task1(30, 7, 11).unwrap();
        let x: Vec<f64> = (0..30).map(|i| ((i as f64) * 0.37).sin() * 0.2).collect();
        let mut expect = 0.0;
        for a in &p.centers {
            let d: f64 = x.iter().zip(a.iter()).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
            if d > 1.0 {
                expect += d - 1.0;
            }
        }
        assert!((fts_value(&p, &x).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn generator_norms_and_determinism() {
        let p = generate_task1(50, 10, 3).unwrap();
        for a in &p.centers {
            let r = norm(a);
            assert!(r > 1.0 && r < 1.5, "norm {r}");
        }
        let q = generate_task1(50, 10, 3).unwrap();
        assert_eq!(p.centers, q.centers);
        assert_ne!(p.centers, generate_task1(50, 10, 4).unwrap().centers);
        assert!(generate_task1(0, 1, 0).is_err());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let p = generate_task1(5000, 4, 9).unwrap();
        let x: Vec<f64> = (0..5000).map(|i| ((i as f64) * 0.01).cos() * 0.01).collect();
        let seq = p.clone().with_parallel(false);
        let par = p.with_parallel(true);
        assert_eq!(fts_value(&seq, &x).unwrap(), fts_value(&par, &x).unwrap());
        assert_eq!(fts_subgradient(&seq, &x).unwrap(), fts_subgradient(&par, &x).unwrap());
    }
}
