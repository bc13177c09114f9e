//! Noise-injecting oracle wrapper.
//!
//! Gradients are perturbed by at most `Δ` in norm and values are lowered by at
//! most `δ`, so `f_δ(x) ≤ f(x) ≤ f_δ(x) + δ`. Noise is drawn fresh per query
//! from a per-instance stream; the wrapper is `!Sync` and one instance must
//! serve exactly one run.

use std::cell::RefCell;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::oracle::{ModelOracle, OracleMeta, Regularizer};
use crate::vector::{dist, Vector};

#[derive(Clone, Debug, PartialEq)]
pub enum NoiseMode {
    /// Gradient error `r·u`, `u` uniform on the sphere, `r` uniform on `[0, Δ]`;
    /// value error uniform on `[0, δ]`.
    RandomSphere,
    /// Gradient error `Δ·u₀` for a fixed unit `u₀`; value error exactly `δ`.
    Adversarial { direction: Vector },
}

pub struct NoisyOracle<O> {
    inner: O,
    grad_err: f64,
    value_err: f64,
    mode: NoiseMode,
    seed: u64,
    rng: RefCell<ChaCha8Rng>,
}

impl<O: ModelOracle> NoisyOracle<O> {
    pub fn new(inner: O, grad_err: f64, value_err: f64, mode: NoiseMode, seed: u64) -> Result<Self> {
        if !(grad_err >= 0.0 && grad_err.is_finite()) || !(value_err >= 0.0 && value_err.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise levels must be finite and nonnegative, got Delta = {grad_err}, delta = {value_err}"
            )));
        }
        let mode = match mode {
            NoiseMode::Adversarial { direction } => {
                check_dim(inner.dim(), direction.dim())?;
                let len = direction.norm();
                if len == 0.0 {
                    return Err(Error::InvalidParameter("adversarial direction must be nonzero".into()));
                }
                NoiseMode::Adversarial {
                    direction: Vector::from_raw(direction.iter().map(|c| c / len).collect()),
                }
            }
            m => m,
        };
        Ok(Self {
            inner,
            grad_err,
            value_err,
            mode,
            seed,
            rng: RefCell::new(super::rng(seed)),
        })
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn exact_gradient(&self, x: &[f64]) -> Vector {
        self.inner.gradient(x)
    }

    pub fn exact_value(&self, x: &[f64]) -> f64 {
        self.inner.value(x)
    }
}

/// `∇f(x)` plus noise of norm at most `Δ`.
pub fn noisy_gradient<O: ModelOracle>(o: &NoisyOracle<O>, x: &[f64]) -> Result<Vector> {
    check_dim(o.inner.dim(), x.len())?;
    Ok(o.gradient(x))
}

impl<O: ModelOracle> ModelOracle for NoisyOracle<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let f = self.inner.value(x);
        if self.value_err == 0.0 {
            return f;
        }
        let drop = match self.mode {
            NoiseMode::RandomSphere => self.rng.borrow_mut().random_range(0.0..=self.value_err),
            NoiseMode::Adversarial { .. } => self.value_err,
        };
        let out = f - drop;
        assert!(out <= f && f <= out + self.value_err * (1.0 + 1e-12) + f64::EPSILON * f.abs());
        out
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        let g = self.inner.gradient(x);
        if self.grad_err == 0.0 {
            return g;
        }
        let noise: Vec<f64> = match &self.mode {
            NoiseMode::RandomSphere => {
                let mut rng = self.rng.borrow_mut();
                let u = super::unit_direction(&mut *rng, g.dim());
                let r = rng.random_range(0.0..=self.grad_err);
                u.into_iter().map(|c| r * c).collect()
            }
            NoiseMode::Adversarial { direction } => direction.iter().map(|c| self.grad_err * c).collect(),
        };
        let out = Vector::from_raw(g.iter().zip(&noise).map(|(a, b)| a + b).collect());
        assert!(dist(&out, &g) <= self.grad_err * (1.0 + 1e-12) + 1e-15);
        out
    }

    fn regularizer(&self) -> &Regularizer {
        self.inner.regularizer()
    }

    fn meta(&self) -> OracleMeta {
        let m = self.inner.meta();
        OracleMeta {
            gamma: m.gamma,
            known_grad_err: m.known_grad_err.map(|d| d + self.grad_err),
            known_value_err: m.known_value_err.map(|d| d + self.value_err),
            known_l: m.known_l,
            exact_values: m.exact_values && self.value_err == 0.0,
        }
    }
}
