use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Infection and recovery rates of the scalar SIS model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SisParams {
    pub beta: f64,
    pub gamma: f64,
}

impl SisParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta >= 0.0 && self.gamma.is_finite() && self.gamma >= 0.0) {
            return invalid(format!(
                "SIS rates must be finite and nonnegative, got beta={}, gamma={}",
                self.beta, self.gamma
            ));
        }
        Ok(())
    }

    pub fn theta(&self) -> DVector<f64> {
        DVector::from_vec(vec![self.beta, self.gamma])
    }

    /// Endemic equilibrium `1 − γ/β`, when `β > γ`.
    pub fn equilibrium(&self) -> Option<f64> {
        (self.beta > self.gamma).then(|| 1.0 - self.gamma / self.beta)
    }
}

pub(crate) fn check_proportion(i: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&i) {
        return invalid(format!("infected proportion must lie in [0, 1], got {i}"));
    }
    Ok(())
}

/// `φ(I) = [(1 − I)·I, −I]`.
pub fn sis_regressor(i: f64) -> Result<DMatrix<f64>> {
    check_proportion(i)?;
    Ok(DMatrix::from_row_slice(1, 2, &[(1.0 - i) * i, -i]))
}

/// `İ = (1 − I)·β·I − γ·I`.
pub fn sis_drift(i: f64, p: &SisParams) -> Result<f64> {
    check_proportion(i)?;
    Ok((1.0 - i) * p.beta * i - p.gamma * i)
}
