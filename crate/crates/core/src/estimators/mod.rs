//! Online parameter estimators.
//!
//! [`GwRls`] is the greedily-weighted recursive least squares estimator,
//! [`EfRls`] the exponential-forgetting baseline and [`GradientDescent`]
//! the first-order identifier. [`batch_weighted_solve`] solves the weighted
//! cost that the greedy estimator minimizes in closed form and serves as
//! its oracle.

mod batch;
mod efrls;
mod gradient;
mod gwrls;

pub use batch::{batch_weighted_solve, batch_weighted_system, greedy_weight, WeightedCostSpec};
pub use efrls::EfRls;
pub use gradient::{gradient_step, GradientDescent};
pub use gwrls::{Acceptance, GwRls};

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::signal::{all_finite, Datum};

/// Outcome of a single estimator update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepInfo {
    /// Excitation-set decision, for estimators that keep one.
    pub acceptance: Option<Acceptance>,
}

/// A sequential online estimator with resettable auxiliary state.
///
/// `reset` restores the auxiliary state (covariance, excitation set) to
/// its initial value and leaves the parameter estimate alone.
pub trait OnlineEstimator {
    fn dim(&self) -> usize;
    fn theta(&self) -> &DVector<f64>;
    fn step(&mut self, d: &Datum) -> Result<StepInfo>;
    fn reset(&mut self);
    fn set_theta(&mut self, theta: DVector<f64>) -> Result<()>;
    fn initial_theta(&self) -> &DVector<f64>;

    /// Current covariance `P`, when the estimator keeps one.
    fn covariance(&self) -> Option<&DMatrix<f64>> {
        None
    }

    /// `κ(H⁽ᵉ⁾)` for estimators with an excitation set.
    fn excitation_kappa(&self) -> Option<f64> {
        None
    }
}

/// Runtime-selected estimator.
#[derive(Debug, Clone)]
pub enum Estimator {
    GwRls(GwRls),
    EfRls(EfRls),
    Gradient(GradientDescent),
}

impl OnlineEstimator for Estimator {
    fn dim(&self) -> usize {
        match self {
            Estimator::GwRls(e) => e.dim(),
            Estimator::EfRls(e) => e.dim(),
            Estimator::Gradient(e) => e.dim(),
        }
    }

    fn theta(&self) -> &DVector<f64> {
        match self {
            Estimator::GwRls(e) => e.theta(),
            Estimator::EfRls(e) => e.theta(),
            Estimator::Gradient(e) => e.theta(),
        }
    }

    fn step(&mut self, d: &Datum) -> Result<StepInfo> {
        match self {
            Estimator::GwRls(e) => OnlineEstimator::step(e, d),
            Estimator::EfRls(e) => OnlineEstimator::step(e, d),
            Estimator::Gradient(e) => e.step(d),
        }
    }

    fn reset(&mut self) {
        match self {
            Estimator::GwRls(e) => e.reset(),
            Estimator::EfRls(e) => e.reset(),
            Estimator::Gradient(e) => e.reset(),
        }
    }

    fn set_theta(&mut self, theta: DVector<f64>) -> Result<()> {
        match self {
            Estimator::GwRls(e) => e.set_theta(theta),
            Estimator::EfRls(e) => e.set_theta(theta),
            Estimator::Gradient(e) => e.set_theta(theta),
        }
    }

    fn initial_theta(&self) -> &DVector<f64> {
        match self {
            Estimator::GwRls(e) => e.initial_theta(),
            Estimator::EfRls(e) => e.initial_theta(),
            Estimator::Gradient(e) => e.initial_theta(),
        }
    }

    fn covariance(&self) -> Option<&DMatrix<f64>> {
        match self {
            Estimator::GwRls(e) => e.covariance(),
            Estimator::EfRls(e) => e.covariance(),
            Estimator::Gradient(e) => e.covariance(),
        }
    }

    fn excitation_kappa(&self) -> Option<f64> {
        match self {
            Estimator::GwRls(e) => e.excitation_kappa(),
            Estimator::EfRls(e) => e.excitation_kappa(),
            Estimator::Gradient(e) => e.excitation_kappa(),
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("forgetting factor must lie in (0, 1], got {alpha}"));
    }
    Ok(())
}

/// Symmetric positive definite check via Cholesky.
pub(crate) fn check_pd(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return invalid(format!("{what} must be a non-empty square matrix"));
    }
    if !all_finite(m.iter()) {
        return invalid(format!("{what} has non-finite entries"));
    }
    let scale = 1.0 + m.amax();
    if (m - m.transpose()).amax() > 1e-9 * scale {
        return invalid(format!("{what} is not symmetric"));
    }
    if m.clone().cholesky().is_none() {
        return invalid(format!("{what} is not positive definite"));
    }
    Ok(())
}

pub(crate) fn check_datum(d: &Datum, p: usize) -> Result<()> {
    if d.phi.ncols() != p {
        return invalid(format!(
            "datum {} has {} regressor columns, estimator dimension is {p}",
            d.k,
            d.phi.ncols()
        ));
    }
    if d.phi.nrows() != d.psi.len() {
        return invalid(format!("datum {}: regressor/target row mismatch", d.k));
    }
    if !all_finite(d.phi.iter()) || !all_finite(d.psi.iter()) {
        return invalid(format!("datum {} has non-finite entries", d.k));
    }
    Ok(())
}

/// Matrix-inversion-lemma covariance update
/// `P ← (1/α)·P·(I − Φᵀ(αI + ΦPΦᵀ)⁻¹ΦP)`, symmetrized.
pub(crate) fn covariance_update(
    p: &DMatrix<f64>,
    phi: &DMatrix<f64>,
    alpha: f64,
) -> Result<DMatrix<f64>> {
    if phi.nrows() == 0 {
        return Ok(p / alpha);
    }
    let phi_p = phi * p;
    let mut s = &phi_p * phi.transpose();
    for i in 0..s.nrows() {
        s[(i, i)] += alpha;
    }
    crate::signal::symmetrize(&mut s);
    let x = match s.clone().cholesky() {
        Some(ch) => ch.solve(&phi_p),
        None => s
            .lu()
            .solve(&phi_p)
            .ok_or_else(|| Error::Numerical("singular innovation matrix".into()))?,
    };
    let mut next = (p - phi_p.transpose() * x) / alpha;
    crate::signal::symmetrize(&mut next);
    if !all_finite(next.iter()) {
        return Err(Error::Numerical("covariance update produced non-finite values".into()));
    }
    Ok(next)
}
