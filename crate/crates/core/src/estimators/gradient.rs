use nalgebra::{DMatrix, DVector};

use super::{check_datum, OnlineEstimator, StepInfo};
use crate::error::{invalid, Result};
use crate::signal::Datum;

/// One unit-gain gradient step `θ + φᵀ(ψ − φθ)`.
pub fn gradient_step(theta: &DVector<f64>, d: &Datum) -> Result<DVector<f64>> {
    check_datum(d, theta.len())?;
    Ok(theta + d.phi.transpose() * d.residual(theta))
}

/// Stateless first-order identifier driven by [`gradient_step`].
#[derive(Debug, Clone)]
pub struct GradientDescent {
    theta: DVector<f64>,
    theta0: DVector<f64>,
}

impl GradientDescent {
    pub fn new(theta0: DVector<f64>) -> Self {
        Self {
            theta: theta0.clone(),
            theta0,
        }
    }
}

impl OnlineEstimator for GradientDescent {
    fn dim(&self) -> usize {
        self.theta.len()
    }

    fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    fn step(&mut self, d: &Datum) -> Result<StepInfo> {
        self.theta = gradient_step(&self.theta, d)?;
        Ok(StepInfo::default())
    }

    // No auxiliary state.
    fn reset(&mut self) {}

    fn set_theta(&mut self, theta: DVector<f64>) -> Result<()> {
        if theta.len() != self.theta.len() {
            return invalid("parameter vector dimension mismatch");
        }
        self.theta = theta;
        Ok(())
    }

    fn initial_theta(&self) -> &DVector<f64> {
        &self.theta0
    }

    fn covariance(&self) -> Option<&DMatrix<f64>> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let theta = DVector::from_vec(vec![0.0, 0.0]);
        let d = Datum::scalar(0, 0.0, &[1.0, 0.0], 1.0).unwrap();
        assert_eq!(gradient_step(&theta, &d).unwrap(), DVector::from_vec(vec![1.0, 0.0]));

        let theta = DVector::from_vec(vec![2.0, 3.0]);
        let d = Datum::scalar(0, 0.0, &[1.0, 1.0], 5.0).unwrap();
        assert_eq!(gradient_step(&theta, &d).unwrap(), theta);

        assert!(gradient_step(&DVector::zeros(3), &d).is_err());
    }
}
