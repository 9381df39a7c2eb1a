use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::EwmaState;
use crate::error::{invalid, Result};

/// Survival function of the χ² distribution with one degree of freedom,
/// `1 − CDF(D) = erfc(√(D/2))`.
pub fn chi2_sf_1dof(d: f64) -> Result<f64> {
    if d.is_nan() || d < 0.0 {
        return invalid(format!("χ² statistic must be nonnegative, got {d}"));
    }
    Ok(erfc((d / 2.0).sqrt()))
}

/// Detector hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrtConfig {
    /// EWMA weight η.
    pub eta: f64,
    /// Significance level τ.
    pub tau: f64,
    /// Detections are suppressed until this many shortfalls are recorded.
    #[serde(default)]
    pub min_samples: usize,
    /// Zero the shortfall statistics and re-seed the EWMA after a detection.
    #[serde(default)]
    pub reset_on_change: bool,
}

impl LrtConfig {
    pub fn new(eta: f64, tau: f64) -> Self {
        Self {
            eta,
            tau,
            min_samples: 0,
            reset_on_change: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta) {
            return invalid(format!("eta must lie in [0, 1], got {}", self.eta));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return invalid(format!("tau must lie in [0, 1], got {}", self.tau));
        }
        Ok(())
    }
}

/// Result of feeding one predictability sample to the detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LrtOutcome {
    pub y: f64,
    /// EWMA prediction `Z_{k−1}` the sample was compared against.
    pub z_prev: Option<f64>,
    /// Squared shortfall, present only for downward drifts.
    pub e: Option<f64>,
    pub d: Option<f64>,
    pub p: Option<f64>,
    pub detected: bool,
}

/// Observable detector state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrtSnapshot {
    pub z: Option<f64>,
    pub n: usize,
    pub lambda_n: f64,
}

/// Recursive likelihood-ratio change-point detector.
///
/// Shortfalls `E = (Z_{k−1} − Y_k)²` on downward drifts are treated as
/// i.i.d. exponential with rate `λ_n = n / ΣE`. A new shortfall is tested
/// against the hypothesis that it shares that rate; on rejection the
/// detector reports a change and leaves its statistics untouched, so the
/// abnormal sample never enters the running rate or the EWMA.
#[derive(Debug, Clone)]
pub struct LrtDetector {
    config: LrtConfig,
    ewma: EwmaState,
    n: usize,
    lambda_n: f64,
}

impl LrtDetector {
    pub fn new(config: LrtConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            ewma: EwmaState::new(config.eta)?,
            config,
            n: 0,
            lambda_n: 0.0,
        })
    }

    /// Detector restored from a snapshot.
    pub fn with_state(config: LrtConfig, snapshot: LrtSnapshot) -> Result<Self> {
        let mut det = Self::new(config)?;
        if (snapshot.n == 0) != (snapshot.lambda_n == 0.0)
            || !(snapshot.lambda_n.is_finite() && snapshot.lambda_n >= 0.0)
        {
            return invalid("lambda_n must be positive exactly when n > 0");
        }
        if let Some(z) = snapshot.z {
            det.ewma.update(z)?;
        }
        det.n = snapshot.n;
        det.lambda_n = snapshot.lambda_n;
        Ok(det)
    }

    pub fn config(&self) -> &LrtConfig {
        &self.config
    }

    pub fn snapshot(&self) -> LrtSnapshot {
        LrtSnapshot {
            z: self.ewma.value(),
            n: self.n,
            lambda_n: self.lambda_n,
        }
    }

    pub fn step(&mut self, y: f64) -> Result<LrtOutcome> {
        if !y.is_finite() {
            return invalid("predictability sample must be finite");
        }
        let mut out = LrtOutcome {
            y,
            z_prev: self.ewma.value(),
            e: None,
            d: None,
            p: None,
            detected: false,
        };
        let Some(z_prev) = out.z_prev else {
            self.ewma.update(y)?;
            return Ok(out);
        };

        let drift = z_prev - y;
        if drift > 0.0 {
            let e = drift * drift;
            let n = self.n as f64;
            // n = 0: n/λ_n and n·ln λ_n are taken as 0.
            let (inv_sum, log_term) = if self.n == 0 {
                (0.0, 0.0)
            } else {
                (n / self.lambda_n, n * self.lambda_n.ln())
            };
            let lambda = (n + 1.0) / (inv_sum + e);
            let d = 2.0 * (log_term - (n + 1.0) * lambda.ln() + 1.0);
            // The statistic can dip below zero; the χ² CDF vanishes there.
            let p = chi2_sf_1dof(d.max(0.0))?;
            out.e = Some(e);
            out.d = Some(d);
            out.p = Some(p);
            if p <= self.config.tau && self.n >= self.config.min_samples {
                out.detected = true;
                if self.config.reset_on_change {
                    self.n = 0;
                    self.lambda_n = 0.0;
                    self.ewma.clear();
                }
                return Ok(out);
            }
            self.n += 1;
            self.lambda_n = lambda;
        }
        self.ewma.update(y)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn detector(tau: f64, z: f64, n: usize, lambda_n: f64) -> LrtDetector {
        LrtDetector::with_state(
            LrtConfig::new(0.5, tau),
            LrtSnapshot {
                z: Some(z),
                n,
                lambda_n,
            },
        )
        .unwrap()
    }

    #[test]
    fn chi2_values() {
        assert_eq!(chi2_sf_1dof(0.0).unwrap(), 1.0);
        assert!((chi2_sf_1dof(3.841).unwrap() - 0.05).abs() <= 5e-4);
        assert!((chi2_sf_1dof(2.0).unwrap() - 0.15730).abs() <= 1e-4);
        assert!(chi2_sf_1dof(-1.0).is_err());
        assert!(chi2_sf_1dof(f64::NAN).is_err());
    }

    #[test]
    fn first_call_only_seeds() {
        let mut det = LrtDetector::new(LrtConfig::new(0.5, 0.1)).unwrap();
        let out = det.step(3.0).unwrap();
        assert!(!out.detected);
        assert_eq!(out.e, None);
        assert_eq!(det.snapshot().z, Some(3.0));
        assert_eq!(det.snapshot().n, 0);
    }

    #[test]
    fn upward_drift_is_not_tested() {
        let mut det = detector(0.1, 1.0, 3, 2.0);
        let out = det.step(5.0).unwrap();
        assert!(!out.detected);
        assert_eq!(out.d, None);
        let s = det.snapshot();
        assert_eq!((s.n, s.lambda_n), (3, 2.0));
        assert_eq!(s.z, Some(3.0));
    }

    #[test]
    fn unit_shortfall_is_not_detected() {
        // n = 1, λ₁ = 1, E = 1 → λ = 1, D = 2, p ≈ 0.157.
        let mut det = detector(0.1, 1.0, 1, 1.0);
        let out = det.step(0.0).unwrap();
        assert_relative_eq!(out.e.unwrap(), 1.0);
        assert_relative_eq!(out.d.unwrap(), 2.0, epsilon = 1e-12);
        assert!((out.p.unwrap() - 0.1573).abs() < 1e-4);
        assert!(!out.detected);
        let s = det.snapshot();
        assert_eq!(s.n, 2);
        assert_relative_eq!(s.lambda_n, 1.0, epsilon = 1e-12);
        assert_eq!(s.z, Some(0.5));
    }

    #[test]
    fn large_shortfall_is_detected_without_state_change() {
        // n = 4, λ₄ = 1, E = 100 → λ = 5/104, D ≈ 32.35.
        let mut det = detector(0.1, 10.0, 4, 1.0);
        let before = det.snapshot();
        let out = det.step(0.0).unwrap();
        assert!(out.detected);
        assert!((out.d.unwrap() - 32.35).abs() < 0.01);
        assert!(out.p.unwrap() < 1e-7);
        assert_eq!(det.snapshot(), before);
    }

    #[test]
    fn first_shortfall_statistic() {
        // n = 0: D = 2(1 + ln E).
        let mut det = detector(0.1, 5.0, 0, 0.0);
        let out = det.step(2.0).unwrap();
        assert_relative_eq!(out.d.unwrap(), 2.0 * (1.0 + 9f64.ln()), epsilon = 1e-12);
        assert!(out.detected);
    }

    #[test]
    fn negative_statistic_maps_to_unit_p_value() {
        let mut det = detector(0.5, 1.0, 1, 1.0);
        let out = det.step(0.9).unwrap();
        assert!(out.d.unwrap() < 0.0);
        assert_eq!(out.p, Some(1.0));
        assert!(!out.detected);
    }

    #[test]
    fn warm_up_suppresses_detection() {
        let mut config = LrtConfig::new(0.5, 0.1);
        config.min_samples = 5;
        let mut det = LrtDetector::with_state(
            config,
            LrtSnapshot {
                z: Some(10.0),
                n: 4,
                lambda_n: 1.0,
            },
        )
        .unwrap();
        let out = det.step(0.0).unwrap();
        assert!(!out.detected);
        assert_eq!(det.snapshot().n, 5);
    }

    #[test]
    fn optional_reset_on_change() {
        let mut config = LrtConfig::new(0.5, 0.1);
        config.reset_on_change = true;
        let mut det = LrtDetector::with_state(
            config,
            LrtSnapshot {
                z: Some(10.0),
                n: 4,
                lambda_n: 1.0,
            },
        )
        .unwrap();
        assert!(det.step(0.0).unwrap().detected);
        assert_eq!(
            det.snapshot(),
            LrtSnapshot {
                z: None,
                n: 0,
                lambda_n: 0.0
            }
        );
        det.step(1.5).unwrap();
        assert_eq!(det.snapshot().z, Some(1.5));
    }

    #[test]
    fn config_validation() {
        assert!(LrtDetector::new(LrtConfig::new(1.5, 0.1)).is_err());
        assert!(LrtDetector::new(LrtConfig::new(0.5, -0.1)).is_err());
        assert!(LrtDetector::new(LrtConfig::new(0.5, 0.1)).unwrap().step(f64::INFINITY).is_err());
    }
}
