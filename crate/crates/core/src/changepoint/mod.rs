//! Change-point detection on the model-predictability signal and the
//! estimator-state resetting wrapper built on it.
//!
//! The predictability `Y_k = −log₁₀‖ψ_k − φ_kθ̂_{k−1}‖²` is smoothed by an
//! EWMA whose previous value predicts the next sample. Downward shortfalls
//! `E = (Z_{k−1} − Y_k)²` are modelled as exponential, and a recursive
//! likelihood-ratio test with a χ²(1) reference flags shortfalls that do
//! not fit the running rate.

mod ewma;
mod lrt;
mod resetting;

pub use ewma::EwmaState;
pub use lrt::{chi2_sf_1dof, LrtConfig, LrtDetector, LrtOutcome, LrtSnapshot};
pub use resetting::{ResetStep, ResettingEstimator};

use nalgebra::DVector;

use crate::error::{invalid, Result};
use crate::signal::{all_finite, Datum};

/// Floor applied to the squared residual before taking the logarithm.
pub const RESIDUAL_FLOOR: f64 = 1e-300;

/// Model predictability `−log₁₀(max(‖ψ − φθ‖², 1e-300))`.
pub fn predictability(d: &Datum, theta_prev: &DVector<f64>) -> Result<f64> {
    if d.phi.ncols() != theta_prev.len() || d.phi.nrows() != d.psi.len() {
        return invalid("predictability: dimension mismatch");
    }
    if !all_finite(d.phi.iter()) || !all_finite(d.psi.iter()) || !all_finite(theta_prev.iter()) {
        return invalid("predictability: non-finite input");
    }
    let sq = d.residual(theta_prev).norm_squared();
    Ok(-sq.max(RESIDUAL_FLOOR).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn predictability_examples() {
        let theta = DVector::from_vec(vec![0.0]);
        let y = |psi: f64| predictability(&Datum::scalar(0, 0.0, &[1.0], psi).unwrap(), &theta).unwrap();
        assert_relative_eq!(y(1.0), 0.0);
        assert_relative_eq!(y(0.1), 2.0, epsilon = 1e-12);
        assert_relative_eq!(y(0.0), 300.0);
    }

    #[test]
    fn predictability_errors() {
        let d = Datum::scalar(0, 0.0, &[1.0, 2.0], 0.0).unwrap();
        assert!(predictability(&d, &DVector::zeros(3)).is_err());
        assert!(predictability(&d, &DVector::from_vec(vec![f64::NAN, 0.0])).is_err());
    }
}
