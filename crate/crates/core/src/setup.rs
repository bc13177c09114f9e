//! Feasible sets, the Bregman divergence and the model subproblem.

use crate::error::{check_dim, Error, Result};
use crate::oracle::{Linearization, Regularizer};
use crate::vector::{dist, dist_sq, Vector};

/// Closed convex set `Q` the iterates live in.
#[derive(Clone, Debug, PartialEq)]
pub enum FeasibleSet {
    WholeSpace,
    EuclideanBall { center: Vector, radius: f64 },
}

impl FeasibleSet {
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Self::EuclideanBall { center, radius })
    }

    /// Unit ball centred at the origin of `R^dim`.
    pub fn unit_ball(dim: usize) -> Self {
        Self::EuclideanBall {
            center: Vector::zeros(dim),
            radius: 1.0,
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            Self::WholeSpace => Ok(()),
            Self::EuclideanBall { center, .. } => check_dim(center.dim(), dim),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Self::WholeSpace => true,
            Self::EuclideanBall { center, radius } => dist(x, center) <= radius * (1.0 + 1e-12),
        }
    }

    /// Euclidean projection onto the set, in place.
    pub fn project_in_place(&self, x: &mut [f64]) {
        if let Self::EuclideanBall { center, radius } = self {
            project_ball_in_place(x, center, *radius);
        }
    }
}

/// Distance-generating function `d`. Only the euclidean `½‖x‖²` is provided.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DistanceGenerator {
    #[default]
    Euclidean,
}

/// Generator `d` together with the feasible set `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProxSetup {
    pub generator: DistanceGenerator,
    pub set: FeasibleSet,
}

impl ProxSetup {
    pub fn euclidean(set: FeasibleSet) -> Self {
        Self {
            generator: DistanceGenerator::Euclidean,
            set,
        }
    }

    pub fn unconstrained() -> Self {
        Self::euclidean(FeasibleSet::WholeSpace)
    }

    /// `V(y, x)` without dimension checks.
    pub(crate) fn divergence(&self, y: &[f64], x: &[f64]) -> f64 {
        match self.generator {
            DistanceGenerator::Euclidean => 0.5 * dist_sq(y, x),
        }
    }

    /// Largest `V(y, x0)` over `y ∈ Q`, i.e. an admissible `R²` for a start
    /// point `x0`. Infinite on the whole space.
    pub fn radius_sq_bound(&self, x0: &[f64]) -> f64 {
        match (&self.generator, &self.set) {
            (_, FeasibleSet::WholeSpace) => f64::INFINITY,
            (DistanceGenerator::Euclidean, FeasibleSet::EuclideanBall { center, radius }) => {
                let r = radius + dist(x0, center);
                0.5 * r * r
            }
        }
    }

    /// `argmin_{y ∈ Q} ψ(y, x) + l·V(y, x)` for a linearisation at `x` and the
    /// composite part `reg`.
    ///
    /// In the euclidean case this is the prox of `reg/l` at `x − g/l`,
    /// restricted to `Q`. Pairs whose joint prox has no closed form are
    /// rejected.
    pub fn solve_subproblem(&self, lin: &Linearization, reg: &Regularizer, l: f64) -> Result<Vector> {
        if !(l > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step constant must be positive, got {l}"
            )));
        }
        let DistanceGenerator::Euclidean = self.generator;
        let inv_l = 1.0 / l;
        let mut z: Vec<f64> = lin
            .point
            .iter()
            .zip(lin.gradient.iter())
            .map(|(x, g)| x - g * inv_l)
            .collect();
        match (reg, &self.set) {
            (Regularizer::Zero, set) => set.project_in_place(&mut z),
            (Regularizer::L1 { weight }, FeasibleSet::WholeSpace) => soft_threshold_in_place(&mut z, weight * inv_l),
            (Regularizer::L1 { weight }, FeasibleSet::EuclideanBall { center, radius })
                if center.iter().all(|&c| c == 0.0) =>
            {
                // For an origin-centred ball the joint prox factors as
                // projection after shrinkage.
                soft_threshold_in_place(&mut z, weight * inv_l);
                project_ball_in_place(&mut z, center, *radius);
            }
            (Regularizer::BallIndicator { center, radius }, FeasibleSet::WholeSpace) => {
                project_ball_in_place(&mut z, center, *radius)
            }
            (Regularizer::BallIndicator { center, radius }, set @ FeasibleSet::EuclideanBall { .. })
                if *set
                    == (FeasibleSet::EuclideanBall {
                        center: center.clone(),
                        radius: *radius,
                    }) =>
            {
                project_ball_in_place(&mut z, center, *radius)
            }
            (reg, set) => {
                return Err(Error::UnsupportedCombination(format!(
                    "no closed-form prox for {} over {}",
                    reg.kind_name(),
                    set_name(set)
                )))
            }
        }
        Ok(Vector::from_raw(z))
    }
}

fn set_name(set: &FeasibleSet) -> &'static str {
    match set {
        FeasibleSet::WholeSpace => "the whole space",
        FeasibleSet::EuclideanBall { .. } => "this euclidean ball",
    }
}

/// `V(y, x) = d(y) − d(x) − ⟨∇d(x), y − x⟩`; `½‖y − x‖²` for the euclidean generator.
pub fn bregman_divergence(setup: &ProxSetup, y: &[f64], x: &[f64]) -> Result<f64> {
    setup.set.check_dim(x.len())?;
    check_dim(x.len(), y.len())?;
    Ok(setup.divergence(y, x))
}

/// Euclidean projection of `x` onto the ball `{y : ‖y − center‖ ≤ radius}`.
pub fn project_ball(x: &[f64], center: &[f64], radius: f64) -> Result<Vector> {
    check_dim(center.len(), x.len())?;
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ball radius must be positive, got {radius}"
        )));
    }
    let mut out = x.to_vec();
    project_ball_in_place(&mut out, center, radius);
    Ok(Vector::from_raw(out))
}

pub(crate) fn project_ball_in_place(x: &mut [f64], center: &[f64], radius: f64) {
    let d = dist(x, center);
    if d > radius {
        let s = radius / d;
        for (xi, ci) in x.iter_mut().zip(center) {
            *xi = ci + s * (*xi - ci);
        }
    }
}

pub(crate) fn soft_threshold_in_place(x: &mut [f64], t: f64) {
    for xi in x.iter_mut() {
        *xi = xi.signum() * (xi.abs() - t).max(0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn bregman_examples() {
        let s = ProxSetup::unconstrained();
        assert_eq!(bregman_divergence(&s, &[3.0, 4.0], &[0.0, 0.0]).unwrap(), 12.5);
        assert_eq!(bregman_divergence(&s, &[7.0, -1.0], &[7.0, -1.0]).unwrap(), 0.0);
    }

    #[test]
    fn bregman_dimension_mismatch() {
        let s = ProxSetup::euclidean(FeasibleSet::unit_ball(2));
        assert!(matches!(
            bregman_divergence(&s, &[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
        let s = ProxSetup::unconstrained();
        assert!(bregman_divergence(&s, &[1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn projection_examples() {
        let p = project_ball(&[3.0, 4.0], &[0.0, 0.0], 1.0).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
        assert_eq!(project_ball(&[0.2, 0.0], &[0.0, 0.0], 1.0).unwrap(), v(&[0.2, 0.0]));
        assert!(project_ball(&[1.0], &[0.0, 0.0], 1.0).is_err());
        assert!(project_ball(&[1.0], &[0.0], 0.0).is_err());
    }

    #[test]
    fn ball_rejects_non_positive_radius() {
        assert!(FeasibleSet::ball(v(&[0.0]), -1.0).is_err());
        assert!(FeasibleSet::ball(v(&[0.0]), 0.5).is_ok());
    }

    #[test]
    fn radius_bound_on_ball() {
        let s = ProxSetup::euclidean(FeasibleSet::unit_ball(3));
        assert_eq!(s.radius_sq_bound(&[0.0, 0.0, 0.0]), 0.5);
        assert!(ProxSetup::unconstrained().radius_sq_bound(&[0.0]).is_infinite());
    }

    fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-50.0f64..50.0, n)
    }

    proptest! {
        #[test]
        fn euclidean_bregman_is_half_squared_distance(x in vec_strategy(10), y in vec_strategy(10)) {
            let s = ProxSetup::unconstrained();
            let got = bregman_divergence(&s, &y, &x).unwrap();
            let diff: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let half_sq = 0.5 * diff.iter().map(|d| d * d).sum::<f64>();
            prop_assert_eq!(got, half_sq);
            prop_assert_eq!(bregman_divergence(&s, &x, &x).unwrap(), 0.0);
        }

        #[test]
        fn projection_is_idempotent_and_lands_on_sphere(x in vec_strategy(6), r in 0.1f64..5.0) {
            let c = [0.5, -0.25, 0.0, 1.0, 2.0, -3.0];
            let p = project_ball(&x, &c, r).unwrap();
            let pp = project_ball(&p, &c, r).unwrap();
            prop_assert!(dist(&p, &pp) <= 1e-12 * (r + 4.0));
            let d = dist(&x, &c);
            if d > r {
                prop_assert!((dist(&p, &c) - r).abs() <= 1e-12 * r.max(1.0));
            } else {
                prop_assert_eq!(p.as_slice(), &x[..]);
            }
        }
    }
}
