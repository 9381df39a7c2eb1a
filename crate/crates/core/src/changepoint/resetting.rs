use nalgebra::DVector;

use super::{predictability, LrtConfig, LrtDetector, LrtOutcome};
use crate::error::Result;
use crate::estimators::{OnlineEstimator, StepInfo};
use crate::signal::Datum;

/// What one wrapped update produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ResetStep {
    pub theta: DVector<f64>,
    pub detected: bool,
    pub info: StepInfo,
    pub lrt: LrtOutcome,
}

/// Online estimator whose auxiliary state is reset whenever the
/// likelihood-ratio detector flags a change in predictability.
///
/// The estimate survives a reset unless `reset_theta` is set, in which case
/// it returns to the estimator's initial value as well.
#[derive(Debug, Clone)]
pub struct ResettingEstimator<E> {
    inner: E,
    detector: LrtDetector,
    reset_theta: bool,
}

impl<E: OnlineEstimator> ResettingEstimator<E> {
    pub fn new(inner: E, detector: LrtConfig) -> Result<Self> {
        Ok(Self {
            inner,
            detector: LrtDetector::new(detector)?,
            reset_theta: false,
        })
    }

    pub fn with_theta_reset(mut self, reset_theta: bool) -> Self {
        self.reset_theta = reset_theta;
        self
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }

    pub fn detector(&self) -> &LrtDetector {
        &self.detector
    }

    pub fn into_inner(self) -> E {
        self.inner
    }

    pub fn step(&mut self, d: &Datum) -> Result<ResetStep> {
        // Predictability of the estimate from before this datum.
        let y = predictability(d, self.inner.theta())?;
        let info = self.inner.step(d)?;
        let lrt = self.detector.step(y)?;
        if lrt.detected {
            self.inner.reset();
            if self.reset_theta {
                let theta0 = self.inner.initial_theta().clone();
                self.inner.set_theta(theta0)?;
            }
        }
        Ok(ResetStep {
            theta: self.inner.theta().clone(),
            detected: lrt.detected,
            info,
            lrt,
        })
    }
}
