//! Test objectives packaged as [`ModelOracle`](crate::ModelOracle)s.
//!
//! * [`ball_sum`]: sum of distances to unit balls around random centres.
//! * [`covering`]: smallest enclosing ball, `max_k ‖x − a_k‖`.
//! * [`quadratic`]: strongly convex quadratics and least-squares PL instances.
//! * [`composite`]: smooth part plus a simple regulariser.
//! * [`noisy`]: wrapper injecting bounded gradient and value errors.

pub mod ball_sum;
pub mod composite;
pub mod covering;
pub mod io;
pub mod noisy;
pub mod quadratic;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use ball_sum::{fts_subgradient, fts_value, generate_task1, BallSumProblem};
pub use composite::{composite_oracle, CompositeOracle};
pub use covering::{covering_subgradient, covering_value, generate_task2, MinMaxBallProblem};
pub use noisy::{noisy_gradient, NoiseMode, NoisyOracle};
pub use quadratic::{pl_quadratic_make, PLQuadratic, QuadraticOracle};

use crate::vector::{norm, Vector};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly distributed unit vector in `R^n`.
pub(crate) fn unit_direction<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let mut u: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let len = norm(&u);
        if len > 0.0 {
            u.iter_mut().for_each(|c| *c /= len);
            return u;
        }
    }
}

/// `m` points `r·u` with `u` uniform on the sphere and `r` uniform on the open
/// interval `(lo, hi)`.
pub(crate) fn shell_points(n: usize, m: usize, lo: f64, hi: f64, seed: u64) -> Vec<Vector> {
    let mut rng = rng(seed);
    (0..m)
        .map(|_| {
            let u = unit_direction(&mut rng, n);
            let r = loop {
                let r = rand::Rng::random_range(&mut rng, lo..hi);
                if r > lo {
                    break r;
                }
            };
            Vector::from_raw(u.into_iter().map(|c| r * c).collect())
        })
        .collect()
}
