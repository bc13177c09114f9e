//! The inexact-model oracle contract.
//!
//! An oracle at a query point `x` supplies the inexact value `f_δ(x)` and the
//! vector `g̃(x)` defining the model
//!
//! ```text
//! ψ(y, x) = ⟨g̃(x), y − x⟩ + h(y) − h(x)
//! ```
//!
//! where `h` is the (possibly zero) composite part. The model is sandwiched as
//! `f_δ(x) + ψ(y,x) − γ‖y−x‖ ≤ f(y) ≤ f_δ(x) + ψ(y,x) + δ + Δ‖y−x‖ + L·V(y,x)`.

use crate::error::{Error, Result};
use crate::setup::project_ball_in_place;
use crate::vector::{dist, dot_diff, Vector};

/// Constants of the model, when known. Solvers adapt and never read them.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OracleMeta {
    pub gamma: f64,
    pub known_grad_err: Option<f64>,
    pub known_value_err: Option<f64>,
    pub known_l: Option<f64>,
    /// `f_δ ≡ f`.
    pub exact_values: bool,
}

impl OracleMeta {
    /// Exact values and gradients with `γ = δ = Δ = 0`.
    pub fn exact(known_l: Option<f64>) -> Self {
        Self {
            gamma: 0.0,
            known_grad_err: Some(0.0),
            known_value_err: Some(0.0),
            known_l,
            exact_values: true,
        }
    }
}

/// Simple convex composite part `h` with a closed-form prox.
#[derive(Clone, Debug, PartialEq)]
pub enum Regularizer {
    Zero,
    /// `weight·‖x‖₁`
    L1 {
        weight: f64,
    },
    /// Indicator of `{‖x − center‖ ≤ radius}`.
    BallIndicator {
        center: Vector,
        radius: f64,
    },
}

pub(crate) static ZERO_REGULARIZER: Regularizer = Regularizer::Zero;

impl Regularizer {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Zero => Ok(()),
            Self::L1 { weight } if *weight >= 0.0 && weight.is_finite() => Ok(()),
            Self::L1 { weight } => Err(Error::InvalidParameter(format!(
                "l1 weight must be nonnegative, got {weight}"
            ))),
            Self::BallIndicator { radius, .. } if *radius > 0.0 && radius.is_finite() => Ok(()),
            Self::BallIndicator { radius, .. } => Err(Error::InvalidParameter(format!(
                "indicator radius must be positive, got {radius}"
            ))),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::L1 { weight } => weight * x.iter().map(|c| c.abs()).sum::<f64>(),
            Self::BallIndicator { center, radius } => {
                if dist(x, center) <= radius * (1.0 + 1e-12) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::L1 { .. } => "l1",
            Self::BallIndicator { .. } => "ball-indicator",
        }
    }

    /// `argmin_y h(y) + (1/2t)‖y − z‖²`, in place.
    pub fn prox_in_place(&self, z: &mut [f64], t: f64) {
        match self {
            Self::Zero => {}
            Self::L1 { weight } => crate::setup::soft_threshold_in_place(z, weight * t),
            Self::BallIndicator { center, radius } => project_ball_in_place(z, center, *radius),
        }
    }
}

/// Everything the model `ψ(·, x)` needs, frozen at one query point.
///
/// Noisy oracles draw fresh noise per query, so solvers linearise once per
/// outer iteration and reuse the result for every trial step.
#[derive(Clone, Debug)]
pub struct Linearization {
    pub point: Vector,
    /// `f_δ(x)`
    pub value: f64,
    /// `g̃(x)`
    pub gradient: Vector,
    /// `h(x)`
    pub composite_at_point: f64,
}

impl Linearization {
    /// `ψ(y, x)` for this linearisation and composite part `reg`.
    pub fn model(&self, y: &[f64], reg: &Regularizer) -> f64 {
        let lin = dot_diff(&self.gradient, y, &self.point);
        if reg.is_zero() {
            lin
        } else {
            lin + reg.value(y) - self.composite_at_point
        }
    }
}

/// Source of `f_δ`, the model `ψ` and its metadata.
pub trait ModelOracle {
    fn dim(&self) -> usize;

    /// `f_δ(x)`, including the composite part when present.
    fn value(&self, x: &[f64]) -> f64;

    /// The vector defining the linear part of `ψ(·, x)`.
    fn gradient(&self, x: &[f64]) -> Vector;

    /// The composite part `h`; zero unless overridden.
    fn regularizer(&self) -> &Regularizer {
        &ZERO_REGULARIZER
    }

    fn meta(&self) -> OracleMeta;

    fn linearize(&self, x: &[f64]) -> Linearization {
        Linearization {
            point: Vector::from_raw(x.to_vec()),
            value: self.value(x),
            gradient: self.gradient(x),
            composite_at_point: self.regularizer().value(x),
        }
    }

    /// `ψ(y, x)`.
    fn model(&self, y: &[f64], x: &[f64]) -> f64 {
        self.linearize(x).model(y, self.regularizer())
    }
}

impl<O: ModelOracle + ?Sized> ModelOracle for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vector {
        (**self).gradient(x)
    }
    fn regularizer(&self) -> &Regularizer {
        (**self).regularizer()
    }
    fn meta(&self) -> OracleMeta {
        (**self).meta()
    }
    fn linearize(&self, x: &[f64]) -> Linearization {
        (**self).linearize(x)
    }
}

impl<O: ModelOracle + ?Sized> ModelOracle for Box<O> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vector {
        (**self).gradient(x)
    }
    fn regularizer(&self) -> &Regularizer {
        (**self).regularizer()
    }
    fn meta(&self) -> OracleMeta {
        (**self).meta()
    }
    fn linearize(&self, x: &[f64]) -> Linearization {
        (**self).linearize(x)
    }
}

/// Oracle built from closures, handy for tests and ad-hoc objectives.
pub struct FnOracle<F, G> {
    dim: usize,
    value: F,
    gradient: G,
    meta: OracleMeta,
}

impl<F, G> FnOracle<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    pub fn new(dim: usize, value: F, gradient: G, meta: OracleMeta) -> Self {
        Self {
            dim,
            value,
            gradient,
            meta,
        }
    }
}

impl<F, G> ModelOracle for FnOracle<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &[f64]) -> Vector {
        Vector::from_raw((self.gradient)(x))
    }
    fn meta(&self) -> OracleMeta {
        self.meta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_vanishes_on_diagonal() {
        let o = FnOracle::new(
            2,
            |x| x[0] * x[0] + x[1].abs(),
            |x| vec![2.0 * x[0], x[1].signum()],
            OracleMeta::exact(None),
        );
        let x = [0.3, -1.2];
        assert_eq!(o.model(&x, &x), 0.0);
        assert_eq!(o.model(&[1.3, -1.2], &x), 0.6);
    }

    #[test]
    fn regularizer_validation() {
        assert!(Regularizer::L1 { weight: -1.0 }.validate().is_err());
        assert!(Regularizer::L1 { weight: 0.5 }.validate().is_ok());
        let c = Vector::zeros(2);
        assert!(Regularizer::BallIndicator {
            center: c.clone(),
            radius: 0.0
        }
        .validate()
        .is_err());
        let b = Regularizer::BallIndicator { center: c, radius: 1.0 };
        assert_eq!(b.value(&[0.5, 0.5]), 0.0);
        assert!(b.value(&[2.0, 0.0]).is_infinite());
    }
}
