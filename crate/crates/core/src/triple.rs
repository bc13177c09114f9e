use crate::error::{Error, Result};

/// The jointly halved/doubled `(L, δ, Δ)` state of the acceptance loops.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveTriple {
    /// Step constant `L`.
    pub l: f64,
    /// Value slack `δ`.
    pub value_err: f64,
    /// Gradient slack `Δ`.
    pub grad_err: f64,
}

impl AdaptiveTriple {
    pub fn new(l: f64, value_err: f64, grad_err: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "L must be positive and finite, got {l}"
            )));
        }
        if !(value_err >= 0.0 && value_err.is_finite()) || !(grad_err >= 0.0 && grad_err.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta and Delta must be nonnegative, got {value_err} and {grad_err}"
            )));
        }
        Ok(Self { l, value_err, grad_err })
    }

    /// Multiplies all three components by `factor`, which must be `0.5` or `2`.
    pub fn scale(self, factor: f64) -> Result<Self> {
        if factor == 0.5 || factor == 2.0 {
            Ok(self.scaled_by(factor))
        } else {
            Err(Error::InvalidParameter(format!(
                "triple scale factor must be 0.5 or 2, got {factor}"
            )))
        }
    }

    pub fn halved(self) -> Self {
        self.scaled_by(0.5)
    }

    pub fn doubled(self) -> Self {
        self.scaled_by(2.0)
    }

    fn scaled_by(self, f: f64) -> Self {
        Self {
            l: self.l * f,
            value_err: self.value_err * f,
            grad_err: self.grad_err * f,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scale_examples() {
        let t = AdaptiveTriple::new(4.0, 0.1, 0.2).unwrap();
        let h = t.scale(0.5).unwrap();
        assert_eq!(
            h,
            AdaptiveTriple {
                l: 2.0,
                value_err: 0.05,
                grad_err: 0.1
            }
        );
        assert_eq!(h.scale(2.0).unwrap(), t);
        assert!(t.scale(3.0).is_err());
        assert!(t.scale(1.0).is_err());
    }

    #[test]
    fn constructor_validates() {
        assert!(AdaptiveTriple::new(0.0, 0.0, 0.0).is_err());
        assert!(AdaptiveTriple::new(1.0, -1.0, 0.0).is_err());
        assert!(AdaptiveTriple::new(1.0, 0.0, f64::NAN).is_err());
        assert!(AdaptiveTriple::new(1.0, 0.0, 0.0).is_ok());
    }

    proptest! {
        #[test]
        fn halve_double_round_trip_and_ratios(l in 1e-3f64..1e3, d in 0.0f64..10.0, dd in 0.0f64..10.0) {
            let t = AdaptiveTriple::new(l, d, dd).unwrap();
            prop_assert_eq!(t.halved().doubled(), t);
            prop_assert_eq!(t.doubled().halved(), t);
            let h = t.halved();
            prop_assert_eq!(h.value_err / h.l, t.value_err / t.l);
            prop_assert_eq!(h.grad_err / h.l, t.grad_err / t.l);
        }
    }
}
