use nalgebra::{DMatrix, DVector};

use super::{check_alpha, check_datum, check_pd, covariance_update, OnlineEstimator, StepInfo};
use crate::error::{invalid, Result};
use crate::signal::Datum;

/// Recursive least squares with exponential forgetting.
#[derive(Debug, Clone)]
pub struct EfRls {
    p: DMatrix<f64>,
    theta: DVector<f64>,
    alpha: f64,
    theta0: DVector<f64>,
    p0: DMatrix<f64>,
}

impl EfRls {
    pub fn new(theta0: DVector<f64>, p0: DMatrix<f64>, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_pd(&p0, "prior covariance P0")?;
        if p0.nrows() != theta0.len() {
            return invalid("prior mean and P0 dimensions differ");
        }
        Ok(Self {
            p: p0.clone(),
            theta: theta0.clone(),
            alpha,
            theta0,
            p0,
        })
    }

    pub fn with_scaled_identity(theta0: DVector<f64>, rho: f64, alpha: f64) -> Result<Self> {
        let p = theta0.len();
        Self::new(theta0, DMatrix::identity(p, p) * rho, alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn step(&mut self, d: &Datum) -> Result<()> {
        check_datum(d, self.theta.len())?;
        let p_next = covariance_update(&self.p, &d.phi, self.alpha)?;
        let innovation = d.residual(&self.theta);
        self.theta += &p_next * d.phi.transpose() * innovation;
        self.p = p_next;
        Ok(())
    }
}

impl OnlineEstimator for EfRls {
    fn dim(&self) -> usize {
        self.theta.len()
    }

    fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    fn step(&mut self, d: &Datum) -> Result<StepInfo> {
        EfRls::step(self, d).map(|_| StepInfo::default())
    }

    fn reset(&mut self) {
        self.p = self.p0.clone();
    }

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
        Some(&self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scalar_arithmetic() {
        let mut e = EfRls::new(DVector::from_element(1, 0.0), DMatrix::identity(1, 1), 1.0).unwrap();
        e.step(&Datum::scalar(0, 0.0, &[1.0], 2.0).unwrap()).unwrap();
        assert_relative_eq!(e.covariance().unwrap()[(0, 0)], 0.5, epsilon = 1e-15);
        assert_relative_eq!(e.theta()[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_innovation_keeps_theta() {
        let theta = DVector::from_vec(vec![0.5, -0.25]);
        let mut e = EfRls::with_scaled_identity(theta.clone(), 10.0, 0.9).unwrap();
        e.step(&Datum::scalar(0, 0.0, &[2.0, 4.0], 0.0).unwrap()).unwrap();
        assert_eq!(e.theta(), &theta);
    }

    #[test]
    fn unit_forgetting_matches_normal_equations() {
        // With α = 1 the estimate is the ridge solution (P0⁻¹ + ΣφᵀΦ)⁻¹(P0⁻¹θ0 + Σφᵀψ).
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = 3;
        let theta0 = DVector::zeros(p);
        let mut e = EfRls::with_scaled_identity(theta0, 1e6, 1.0).unwrap();
        let mut a = DMatrix::identity(p, p) * 1e-6;
        let mut b = DVector::zeros(p);
        for k in 0..40 {
            let phi: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
            let psi = rng.random_range(-1.0..1.0);
            let d = Datum::scalar(k, k as f64, &phi, psi).unwrap();
            a += d.phi.transpose() * &d.phi;
            b += d.phi.transpose() * &d.psi;
            e.step(&d).unwrap();
        }
        let batch = a.cholesky().unwrap().solve(&b);
        assert_relative_eq!(e.theta(), &batch, max_relative = 1e-8);
    }

    #[test]
    fn reset_restores_prior_covariance() {
        let mut e = EfRls::with_scaled_identity(DVector::zeros(2), 100.0, 0.95).unwrap();
        e.step(&Datum::scalar(0, 0.0, &[1.0, 2.0], 1.0).unwrap()).unwrap();
        let theta = e.theta().clone();
        OnlineEstimator::reset(&mut e);
        assert_eq!(e.covariance().unwrap(), &(DMatrix::identity(2, 2) * 100.0));
        assert_eq!(e.theta(), &theta);
    }

    #[test]
    fn dimension_mismatch() {
        let mut e = EfRls::with_scaled_identity(DVector::zeros(2), 1.0, 0.95).unwrap();
        assert!(e.step(&Datum::scalar(0, 0.0, &[1.0], 1.0).unwrap()).is_err());
    }
}
