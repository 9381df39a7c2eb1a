//! Regressor data, information matrices and excitation diagnostics.
//!
//! The practical-identifiability (PI) index of a block of data is the
//! condition number of its information matrix `H = Σ φᵀφ`. Persistent
//! excitation (PE) over a window of length `L` asks for the smallest
//! eigenvalue of the partial information matrix to stay above a caller
//! supplied floor `a`; [`moving_pi`] reports both quantities in one pass.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{invalid, Result};

/// Singular values below `RANK_TOL * σ_max` are treated as zero.
pub const RANK_TOL: f64 = 1e-12;

/// One regressor/target pair `(φ_k, ψ_k)` of the data stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Datum {
    pub k: usize,
    pub t: f64,
    /// `n × p` regressor block.
    pub phi: DMatrix<f64>,
    /// Length-`n` target.
    pub psi: DVector<f64>,
}

impl Datum {
    pub fn new(k: usize, t: f64, phi: DMatrix<f64>, psi: DVector<f64>) -> Result<Self> {
        if phi.nrows() != psi.len() {
            return invalid(format!(
                "datum {k}: regressor has {} rows but target has length {}",
                phi.nrows(),
                psi.len()
            ));
        }
        if phi.nrows() == 0 || phi.ncols() == 0 {
            return invalid(format!("datum {k}: empty regressor"));
        }
        if !t.is_finite() || !all_finite(phi.iter()) || !all_finite(psi.iter()) {
            return invalid(format!("datum {k}: non-finite entries"));
        }
        Ok(Self { k, t, phi, psi })
    }

    /// Convenience constructor for a single-row regressor.
    pub fn scalar(k: usize, t: f64, phi: &[f64], psi: f64) -> Result<Self> {
        Self::new(
            k,
            t,
            DMatrix::from_row_slice(1, phi.len(), phi),
            DVector::from_element(1, psi),
        )
    }

    /// Parameter dimension `p`.
    pub fn dim(&self) -> usize {
        self.phi.ncols()
    }

    /// Prediction residual `ψ − φθ`.
    pub fn residual(&self, theta: &DVector<f64>) -> DVector<f64> {
        &self.psi - &self.phi * theta
    }

    /// True when every regressor entry is exactly zero.
    pub fn is_zero_regressor(&self) -> bool {
        self.phi.iter().all(|&v| v == 0.0)
    }
}

pub(crate) fn all_finite<'a>(mut it: impl Iterator<Item = &'a f64>) -> bool {
    it.all(|v| v.is_finite())
}

/// Accumulated information matrix `H = Σ φᵢᵀφᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoMatrix {
    pub h: DMatrix<f64>,
    pub count: usize,
}

impl InfoMatrix {
    pub fn zeros(p: usize) -> Self {
        Self {
            h: DMatrix::zeros(p, p),
            count: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// Returns `H + φᵀφ`, symmetrized.
    pub fn accumulate(&self, phi: &DMatrix<f64>) -> Result<InfoMatrix> {
        let mut next = self.clone();
        next.accumulate_in_place(phi)?;
        Ok(next)
    }

    pub fn accumulate_in_place(&mut self, phi: &DMatrix<f64>) -> Result<()> {
        if phi.ncols() != self.dim() {
            return invalid(format!(
                "regressor has {} columns, information matrix is {}x{}",
                phi.ncols(),
                self.dim(),
                self.dim()
            ));
        }
        if !all_finite(phi.iter()) {
            return invalid("non-finite regressor");
        }
        self.h += phi.transpose() * phi;
        symmetrize(&mut self.h);
        self.count += 1;
        Ok(())
    }

    pub fn condition_number(&self) -> f64 {
        // Square and finite by construction.
        condition_number(&self.h).unwrap_or(f64::INFINITY)
    }

    /// `(λ_min, λ_max)`, with λ_min clamped at zero.
    pub fn eigen_bounds(&self) -> (f64, f64) {
        let (lo, hi) = sym_eigen_bounds(&self.h);
        (lo.max(0.0), hi.max(0.0))
    }
}

/// `M ← (M + Mᵀ)/2`.
pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn sym_eigen_bounds(m: &DMatrix<f64>) -> (f64, f64) {
    if m.nrows() == 0 {
        return (0.0, 0.0);
    }
    let eig = m.clone().symmetric_eigenvalues();
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Ratio of the largest to the smallest singular value.
///
/// Returns `∞` for the zero matrix and whenever `σ_min ≤ RANK_TOL·σ_max`.
pub fn condition_number(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return invalid(format!(
            "condition number needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        ));
    }
    if !all_finite(m.iter()) {
        return invalid("condition number of a non-finite matrix");
    }
    if m.nrows() == 0 {
        return invalid("condition number of an empty matrix");
    }
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min <= RANK_TOL * max {
        return Ok(f64::INFINITY);
    }
    Ok(max / min)
}

/// Conditioning of one window of the regressor signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiReport {
    pub kappa: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Sample indices `(l, l + L)` spanned by the window, inclusive.
    pub window: (usize, usize),
}

impl PiReport {
    /// PE floor check `Σ φᵀφ ⪰ a·I` for this window.
    pub fn exceeds_floor(&self, a: f64) -> bool {
        self.lambda_min >= a
    }
}

/// Moving PI index over windows `{k − L, …, k}` for every `k ≥ L`.
pub fn moving_pi(stream: &[Datum], window: usize) -> Result<Vec<PiReport>> {
    if stream.is_empty() {
        return invalid("moving_pi on an empty stream");
    }
    if window == 0 {
        return invalid("window length must be at least 1");
    }
    if stream.len() < window + 1 {
        return invalid(format!(
            "stream of length {} is shorter than window + 1 = {}",
            stream.len(),
            window + 1
        ));
    }
    let p = stream[0].dim();
    let mut reports = Vec::with_capacity(stream.len() - window);
    for end in window..stream.len() {
        let mut info = InfoMatrix::zeros(p);
        for d in &stream[end - window..=end] {
            info.accumulate_in_place(&d.phi)?;
        }
        let (lambda_min, lambda_max) = info.eigen_bounds();
        reports.push(PiReport {
            kappa: info.condition_number(),
            lambda_min,
            lambda_max,
            window: (stream[end - window].k, stream[end].k),
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn condition_number_basics() {
        assert_relative_eq!(condition_number(&DMatrix::identity(3, 3)).unwrap(), 1.0, epsilon = 1e-12);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0]));
        assert_relative_eq!(condition_number(&d).unwrap(), 4.0, epsilon = 1e-12);
        assert!(condition_number(&DMatrix::zeros(2, 2)).unwrap().is_infinite());
    }

    #[test]
    fn condition_number_rejects_bad_input() {
        assert!(condition_number(&DMatrix::zeros(2, 3)).is_err());
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(condition_number(&m).is_err());
    }

    #[test]
    fn condition_number_rank_tolerance() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-13]));
        assert!(condition_number(&d).unwrap().is_infinite());
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-11]));
        assert!(condition_number(&d).unwrap().is_finite());
    }

    #[test]
    fn accumulate_examples() {
        let row = |a: f64, b: f64| DMatrix::from_row_slice(1, 2, &[a, b]);
        let h = InfoMatrix::zeros(2).accumulate(&row(1.0, 0.0)).unwrap();
        assert_eq!(h.h, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(h.count, 1);

        let eye = InfoMatrix {
            h: DMatrix::identity(2, 2),
            count: 0,
        };
        let h = eye.accumulate(&row(0.0, 1.0)).unwrap();
        assert_eq!(h.h, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]));

        let h = InfoMatrix::zeros(2)
            .accumulate(&row(1.0, 0.0))
            .unwrap()
            .accumulate(&row(0.0, 1.0))
            .unwrap();
        assert_eq!(h.h, DMatrix::identity(2, 2));
        assert_eq!(h.count, 2);
    }

    #[test]
    fn accumulate_dimension_mismatch() {
        let phi = DMatrix::from_row_slice(1, 3, &[1.0, 2.0, 3.0]);
        assert!(InfoMatrix::zeros(2).accumulate(&phi).is_err());
    }

    #[test]
    fn datum_validation() {
        assert!(Datum::scalar(0, 0.0, &[1.0, f64::INFINITY], 0.0).is_err());
        assert!(Datum::new(0, 0.0, DMatrix::zeros(2, 2), DVector::zeros(3)).is_err());
        assert!(Datum::scalar(0, 0.0, &[1.0, 2.0], 3.0).is_ok());
    }

    #[test]
    fn moving_pi_rank_one_stream() {
        let stream: Vec<_> = (0..6)
            .map(|k| Datum::scalar(k, k as f64, &[1.0, 0.0], 0.0).unwrap())
            .collect();
        let reports = moving_pi(&stream, 2).unwrap();
        assert_eq!(reports.len(), 4);
        assert!(reports.iter().all(|r| r.kappa.is_infinite()));
        assert!(reports.iter().all(|r| r.lambda_min == 0.0));
    }

    #[test]
    fn moving_pi_alternating_stream() {
        // Windows of three alternating unit rows hold diag(2,1) or diag(1,2): κ = 2.
        let stream: Vec<_> = (0..8)
            .map(|k| {
                let phi = if k % 2 == 0 { [1.0, 0.0] } else { [0.0, 1.0] };
                Datum::scalar(k, k as f64, &phi, 0.0).unwrap()
            })
            .collect();
        let reports = moving_pi(&stream, 2).unwrap();
        for r in &reports {
            assert_relative_eq!(r.kappa, 2.0, epsilon = 1e-12);
            assert_relative_eq!(r.lambda_min, 1.0, epsilon = 1e-12);
            assert_relative_eq!(r.lambda_max, 2.0, epsilon = 1e-12);
            assert!(r.exceeds_floor(0.5));
            assert!(!r.exceeds_floor(1.5));
        }
        assert_eq!(reports[0].window, (0, 2));
    }

    #[test]
    fn moving_pi_errors() {
        assert!(moving_pi(&[], 2).is_err());
        let stream = vec![Datum::scalar(0, 0.0, &[1.0], 0.0).unwrap()];
        assert!(moving_pi(&stream, 2).is_err());
        assert!(moving_pi(&stream, 0).is_err());
    }
}
