use crate::error::{invalid, Result};

/// Exponentially weighted moving average `Z_k = ηY_k + (1 − η)Z_{k−1}`,
/// seeded with the first sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EwmaState {
    z: f64,
    eta: f64,
    initialized: bool,
}

impl EwmaState {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return invalid(format!("EWMA weight must lie in [0, 1], got {eta}"));
        }
        Ok(Self {
            z: 0.0,
            eta,
            initialized: false,
        })
    }

    /// Current value, `None` before the first sample.
    pub fn value(&self) -> Option<f64> {
        self.initialized.then_some(self.z)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn is_initialized(&self) -> bool {
        self.initialized
    }

    pub fn update(&mut self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return invalid("EWMA sample must be finite");
        }
        self.z = if self.initialized {
            self.eta * y + (1.0 - self.eta) * self.z
        } else {
            y
        };
        self.initialized = true;
        Ok(self.z)
    }

    /// Forget the current value; the next sample re-seeds the average.
    pub fn clear(&mut self) {
        self.initialized = false;
        self.z = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seeded(eta: f64, z: f64) -> EwmaState {
        let mut s = EwmaState::new(eta).unwrap();
        s.update(z).unwrap();
        s
    }

    #[test]
    fn examples() {
        assert_eq!(seeded(1.0, 123.0).clone().update(7.0).unwrap(), 7.0);
        assert_eq!(seeded(0.0, 3.0).clone().update(-50.0).unwrap(), 3.0);
        assert_eq!(seeded(0.5, 2.0).clone().update(4.0).unwrap(), 3.0);
    }

    #[test]
    fn first_sample_seeds() {
        let mut s = EwmaState::new(0.3).unwrap();
        assert_eq!(s.value(), None);
        assert_eq!(s.update(5.0).unwrap(), 5.0);
    }

    #[test]
    fn rejects_bad_weight_and_samples() {
        assert!(EwmaState::new(-0.1).is_err());
        assert!(EwmaState::new(1.1).is_err());
        assert!(EwmaState::new(0.5).unwrap().update(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn convex_combination(eta in 0.0f64..=1.0, z in -1e3f64..1e3, y in -1e3f64..1e3) {
            let next = seeded(eta, z).update(y).unwrap();
            let tol = 1e-12 * (1.0 + z.abs().max(y.abs()));
            prop_assert!(next >= z.min(y) - tol && next <= z.max(y) + tol);
        }
    }
}
