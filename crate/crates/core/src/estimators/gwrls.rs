use log::warn;
use nalgebra::{DMatrix, DVector};

use super::{check_alpha, check_datum, check_pd, covariance_update, OnlineEstimator, StepInfo};
use crate::error::{invalid, Result};
use crate::signal::{Datum, InfoMatrix};

/// Excitation-set decision for one datum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acceptance {
    /// Added to the greedy excitation set.
    Accepted,
    /// Would have worsened `κ(H⁽ᵉ⁾)`; weighted exponentially instead.
    Rejected,
    /// All-zero regressor, ignored without any state change.
    Skipped,
}

impl Acceptance {
    pub fn is_accepted(self) -> bool {
        self == Acceptance::Accepted
    }
}

/// Greedily-weighted recursive least squares.
///
/// Keeps a greedy excitation set: a datum joins the set when adding its
/// information does not worsen the condition number of the set's
/// information matrix `H⁽ᵉ⁾`. Members of the set keep a weight that tends to
/// one, all other data are forgotten exponentially with factor `α`.
#[derive(Debug, Clone)]
pub struct GwRls {
    he: InfoMatrix,
    he_kappa: f64,
    phi_e: Vec<DMatrix<f64>>,
    // Square-root factor with `RᵀR = H⁽ᵉ⁾`, at most `dim` rows.
    phi_e_factor: DMatrix<f64>,
    ups_e: DVector<f64>,
    p: DMatrix<f64>,
    theta: DVector<f64>,
    alpha: f64,
    accepted: Vec<usize>,
    max_excitation: Option<usize>,
    theta0: DVector<f64>,
    p0: DMatrix<f64>,
}

impl GwRls {
    /// Fresh estimator with `H⁽ᵉ⁾ = 0`, so the first nonzero datum is always accepted.
    pub fn new(theta0: DVector<f64>, p0: DMatrix<f64>, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_pd(&p0, "prior covariance P0")?;
        if p0.nrows() != theta0.len() {
            return invalid(format!(
                "prior mean has length {}, P0 is {}x{}",
                theta0.len(),
                p0.nrows(),
                p0.ncols()
            ));
        }
        let p = theta0.len();
        Ok(Self {
            he: InfoMatrix::zeros(p),
            he_kappa: f64::INFINITY,
            phi_e: Vec::new(),
            phi_e_factor: DMatrix::zeros(0, p),
            ups_e: DVector::zeros(p),
            p: p0.clone(),
            theta: theta0.clone(),
            alpha,
            accepted: Vec::new(),
            max_excitation: None,
            theta0,
            p0,
        })
    }

    /// `P0 = ρ·I`.
    pub fn with_scaled_identity(theta0: DVector<f64>, rho: f64, alpha: f64) -> Result<Self> {
        let p = theta0.len();
        Self::new(theta0, DMatrix::identity(p, p) * rho, alpha)
    }

    /// Stop growing the excitation set once it holds `cap` data.
    pub fn with_excitation_cap(mut self, cap: Option<usize>) -> Self {
        self.max_excitation = cap;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn info(&self) -> &InfoMatrix {
        &self.he
    }

    pub fn excitation_regressors(&self) -> &[DMatrix<f64>] {
        &self.phi_e
    }

    pub fn excitation_target(&self) -> &DVector<f64> {
        &self.ups_e
    }

    /// Sample indices (`Datum::k`) in the greedy excitation set.
    pub fn accepted_indices(&self) -> &[usize] {
        &self.accepted
    }

    pub fn step(&mut self, d: &Datum) -> Result<Acceptance> {
        let p = self.theta.len();
        check_datum(d, p)?;
        if d.is_zero_regressor() {
            return Ok(Acceptance::Skipped);
        }

        let info = d.phi.transpose() * &d.phi;
        let cross = d.phi.transpose() * &d.psi;
        let test = self.he.accumulate(&d.phi)?;
        let test_kappa = test.condition_number();
        let mut accept = test_kappa <= self.he_kappa;
        if accept {
            if let Some(cap) = self.max_excitation {
                if self.phi_e.len() >= cap {
                    warn!("excitation set reached its cap of {cap}; datum {} rejected", d.k);
                    accept = false;
                }
            }
        }

        let w = 1.0 - self.alpha;
        let sw = w.sqrt();
        let ups_e = if accept {
            &self.ups_e + &cross
        } else {
            self.ups_e.clone()
        };
        let he_h = if accept { &test.h } else { &self.he.h };

        // Stacked regressor of the update: √(1−α)·Φ⁽ᵉ⁾, then φ_k (scaled only when accepted).
        // The covariance recursion depends on Φ⁽ᵉ⁾ only through Φ⁽ᵉ⁾ᵀΦ⁽ᵉ⁾, so the compact factor stands in for it.
        let last = if accept { sw } else { 1.0 };
        let phi = stack_rows(&(&self.phi_e_factor * sw), &(&d.phi * last));
        let (h, ups) = if accept {
            (he_h * w, &ups_e * w)
        } else {
            (he_h * w + &info, &ups_e * w + &cross)
        };

        let p_next = covariance_update(&self.p, &phi, self.alpha)?;
        let theta_next = &self.theta + &p_next * (ups - h * &self.theta);

        if accept {
            self.he = test;
            self.he_kappa = test_kappa;
            self.phi_e_factor = compress_rows(stack_rows(&self.phi_e_factor, &d.phi));
            self.phi_e.push(d.phi.clone());
            self.ups_e = ups_e;
            self.accepted.push(d.k);
        }
        self.p = p_next;
        self.theta = theta_next;
        Ok(if accept {
            Acceptance::Accepted
        } else {
            Acceptance::Rejected
        })
    }
}

fn stack_rows(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.rows_mut(0, a.nrows()).copy_from(a);
    out.rows_mut(a.nrows(), b.nrows()).copy_from(b);
    out
}

/// Replaces a tall matrix `Φ` by the triangular `R` of its QR factorization (`RᵀR = ΦᵀΦ`).
fn compress_rows(m: DMatrix<f64>) -> DMatrix<f64> {
    if m.nrows() <= m.ncols() {
        m
    } else {
        m.qr().r()
    }
}

impl OnlineEstimator for GwRls {
    fn dim(&self) -> usize {
        self.theta.len()
    }

    fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    fn step(&mut self, d: &Datum) -> Result<StepInfo> {
        GwRls::step(self, d).map(|a| StepInfo {
            acceptance: Some(a),
        })
    }

    fn reset(&mut self) {
        let p = self.theta.len();
        self.he = InfoMatrix::zeros(p);
        self.he_kappa = f64::INFINITY;
        self.phi_e.clear();
        self.phi_e_factor = DMatrix::zeros(0, p);
        self.ups_e = DVector::zeros(p);
        self.p = self.p0.clone();
        self.accepted.clear();
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

    fn excitation_kappa(&self) -> Option<f64> {
        Some(self.he_kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn est(alpha: f64) -> GwRls {
        GwRls::with_scaled_identity(DVector::from_vec(vec![1.0, 1.0]), 1e5, alpha).unwrap()
    }

    #[test]
    fn init_validation() {
        assert!(GwRls::with_scaled_identity(DVector::from_vec(vec![1.0, 1.0]), 1e5, 0.98).is_ok());
        assert!(GwRls::with_scaled_identity(DVector::from_vec(vec![1.0, 1.0]), 1e5, 0.0).is_err());
        assert!(GwRls::with_scaled_identity(DVector::from_vec(vec![1.0, 1.0]), 1e5, 1.01).is_err());
        let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        assert!(GwRls::new(DVector::zeros(2), bad, 0.98).is_err());
        assert!(GwRls::new(DVector::zeros(3), DMatrix::identity(2, 2), 0.98).is_err());
    }

    #[test]
    fn fresh_state_accepts_first_datum() {
        let mut g = est(0.98);
        assert!(g.excitation_kappa().unwrap().is_infinite());
        let d = Datum::scalar(0, 0.0, &[0.3, -0.2], 0.1).unwrap();
        assert_eq!(g.step(&d).unwrap(), Acceptance::Accepted);
        assert_eq!(g.accepted_indices(), &[0]);
    }

    fn seeded_diag21(alpha: f64) -> GwRls {
        // Excitation set {[√2, 0], [0, 1]} gives H⁽ᵉ⁾ = diag(2, 1).
        let mut g = est(alpha);
        let s2 = 2f64.sqrt();
        assert!(g.step(&Datum::scalar(0, 0.0, &[s2, 0.0], 0.0).unwrap()).unwrap().is_accepted());
        assert!(g.step(&Datum::scalar(1, 0.1, &[0.0, 1.0], 0.0).unwrap()).unwrap().is_accepted());
        assert_relative_eq!(g.info().h, DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0])), epsilon = 1e-12);
        assert_relative_eq!(g.excitation_kappa().unwrap(), 2.0, epsilon = 1e-12);
        g
    }

    #[test]
    fn acceptance_improves_conditioning() {
        let mut g = seeded_diag21(0.98);
        // κ(diag(2,2)) = 1 ≤ 2
        let a = g.step(&Datum::scalar(2, 0.2, &[0.0, 1.0], 0.0).unwrap()).unwrap();
        assert_eq!(a, Acceptance::Accepted);
        assert_relative_eq!(g.excitation_kappa().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejection_keeps_set_and_uses_exponential_weight() {
        let alpha = 0.9;
        let mut g = seeded_diag21(alpha);
        let before = g.clone();
        // κ(diag(3,1)) = 3 > 2
        let d = Datum::scalar(2, 0.2, &[1.0, 0.0], 0.5).unwrap();
        assert_eq!(g.step(&d).unwrap(), Acceptance::Rejected);
        assert_eq!(g.info(), before.info());
        assert_eq!(g.accepted_indices(), &[0, 1]);

        // Reproduce the update from H = (1−α)·diag(2,1) + diag(1,0).
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0])) * (1.0 - alpha)
            + DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
        let ups = before.excitation_target() * (1.0 - alpha) + DVector::from_vec(vec![0.5, 0.0]);
        let p_prev = before.covariance().unwrap();
        let p_next = (alpha * p_prev.clone().try_inverse().unwrap() + &h).try_inverse().unwrap();
        assert_relative_eq!(g.covariance().unwrap(), &p_next, max_relative = 1e-8);
        let theta = before.theta() + &p_next * (ups - &h * before.theta());
        assert_relative_eq!(g.theta(), &theta, max_relative = 1e-8);
    }

    #[test]
    fn zero_regressor_is_skipped() {
        let mut g = est(0.98);
        let before = g.clone();
        let d = Datum::scalar(0, 0.0, &[0.0, 0.0], 1.0).unwrap();
        assert_eq!(g.step(&d).unwrap(), Acceptance::Skipped);
        assert_eq!(g.covariance(), before.covariance());
        assert_eq!(g.theta(), before.theta());
        assert!(g.accepted_indices().is_empty());
    }

    #[test]
    fn excitation_cap_rejects() {
        let mut g = est(0.98).with_excitation_cap(Some(1));
        g.step(&Datum::scalar(0, 0.0, &[1.0, 0.0], 0.0).unwrap()).unwrap();
        let a = g.step(&Datum::scalar(1, 0.1, &[0.0, 1.0], 0.0).unwrap()).unwrap();
        assert_eq!(a, Acceptance::Rejected);
        assert_eq!(g.accepted_indices().len(), 1);
    }

    #[test]
    fn dimension_and_finiteness_errors() {
        let mut g = est(0.98);
        assert!(g.step(&Datum::scalar(0, 0.0, &[1.0, 2.0, 3.0], 0.0).unwrap()).is_err());
        let mut d = Datum::scalar(0, 0.0, &[1.0, 2.0], 0.0).unwrap();
        d.psi[0] = f64::NAN;
        assert!(g.step(&d).is_err());
    }

    #[test]
    fn reset_restores_initial_auxiliary_state() {
        let mut g = seeded_diag21(0.98);
        let theta = g.theta().clone();
        OnlineEstimator::reset(&mut g);
        assert_eq!(g.info(), &InfoMatrix::zeros(2));
        assert!(g.excitation_regressors().is_empty());
        assert_eq!(g.excitation_target(), &DVector::zeros(2));
        assert_eq!(g.covariance().unwrap(), &(DMatrix::identity(2, 2) * 1e5));
        assert_eq!(g.theta(), &theta);
    }
}
