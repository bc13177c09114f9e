//! `f = g + h` with smooth `g` and a simple `h`; the model keeps `h` exactly.

use crate::error::{Error, Result};
use crate::oracle::{ModelOracle, OracleMeta, Regularizer};
use crate::vector::Vector;

pub struct CompositeOracle<G> {
    smooth: G,
    reg: Regularizer,
}

/// Oracle with model `ψ(y,x) = ⟨g̃(x), y − x⟩ + h(y) − h(x)`.
pub fn composite_oracle<G: ModelOracle>(smooth: G, h: Regularizer) -> Result<CompositeOracle<G>> {
    h.validate()?;
    if !smooth.regularizer().is_zero() {
        return Err(Error::UnsupportedCombination(format!(
            "smooth part already carries a {} composite term",
            smooth.regularizer().kind_name()
        )));
    }
    Ok(CompositeOracle { smooth, reg: h })
}

impl<G> CompositeOracle<G> {
    pub fn smooth(&self) -> &G {
        &self.smooth
    }
}

impl<G: ModelOracle> ModelOracle for CompositeOracle<G> {
    fn dim(&self) -> usize {
        self.smooth.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.smooth.value(x) + self.reg.value(x)
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        self.smooth.gradient(x)
    }

    fn regularizer(&self) -> &Regularizer {
        &self.reg
    }

    fn meta(&self) -> OracleMeta {
        self.smooth.meta()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FnOracle;
    use crate::setup::ProxSetup;
    use crate::solver::model::model_step;
    use rand::Rng;

    fn half_sq() -> impl ModelOracle {
        FnOracle::new(1, |x| 0.5 * x[0] * x[0], |x| vec![x[0]], OracleMeta::exact(Some(1.0)))
    }

    #[test]
    fn zero_h_reduces_to_linear_model() {
        let o = composite_oracle(half_sq(), Regularizer::Zero).unwrap();
        let plain = half_sq();
        assert_eq!(o.model(&[2.0], &[0.5]), plain.model(&[2.0], &[0.5]));
        let s = ProxSetup::unconstrained();
        assert_eq!(
            model_step(&o, &s, &[0.5], 2.0).unwrap(),
            model_step(&plain, &s, &[0.5], 2.0).unwrap()
        );
    }

    #[test]
    fn absolute_value_model() {
        let o = composite_oracle(half_sq(), Regularizer::L1 { weight: 1.0 }).unwrap();
        for (y, x) in [(0.3, -0.7), (-2.0, 1.5), (0.0, 0.25)] {
            let expect: f64 = x * (y - x) + f64::abs(y) - f64::abs(x);
            assert!((o.model(&[y], &[x]) - expect).abs() < 1e-15);
        }
        assert_eq!(o.model(&[0.4], &[0.4]), 0.0);
    }

    #[test]
    fn prox_matches_soft_threshold() {
        let s = ProxSetup::unconstrained();
        let mut rng = crate::problems::rng(17);
        for _ in 0..100 {
            let g: f64 = rng.random_range(-5.0..5.0);
            let x: f64 = rng.random_range(-3.0..3.0);
            let w: f64 = rng.random_range(0.0..2.0);
            let l: f64 = rng.random_range(0.1..10.0);
            let smooth = FnOracle::new(1, move |y| g * y[0], move |_| vec![g], OracleMeta::exact(Some(0.0)));
            let o = composite_oracle(smooth, Regularizer::L1 { weight: w }).unwrap();
            let z = x - g / l;
            let expect = z.signum() * (z.abs() - w / l).max(0.0);
            assert!((model_step(&o, &s, &[x], l).unwrap()[0] - expect).abs() <= 1e-14 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn rejects_invalid_or_nested_h() {
        assert!(composite_oracle(half_sq(), Regularizer::L1 { weight: -0.5 }).is_err());
        let inner = composite_oracle(half_sq(), Regularizer::L1 { weight: 1.0 }).unwrap();
        assert!(matches!(
            composite_oracle(inner, Regularizer::L1 { weight: 1.0 }),
            Err(Error::UnsupportedCombination(_))
        ));
    }
}
