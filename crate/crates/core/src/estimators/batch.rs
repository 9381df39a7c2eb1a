use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use super::{check_alpha, check_datum, check_pd};
use crate::error::{invalid, Error, Result};
use crate::signal::Datum;

/// Weighted least-squares cost with a greedy excitation set.
///
/// Positions in `data` are the cost's sample indices `i = 0, 1, …`;
/// `excitation` holds the positions that belong to the excitation set.
#[derive(Debug, Clone)]
pub struct WeightedCostSpec {
    pub data: Vec<Datum>,
    pub excitation: BTreeSet<usize>,
    pub alpha: f64,
    pub theta0: DVector<f64>,
    pub p0: DMatrix<f64>,
}

/// Weight of sample `i` at horizon `k`:
/// `(1−α)·Σ_{l=i..k} α^{k−l}` for excitation-set members, `α^{k−i}` otherwise.
pub fn greedy_weight(i: usize, k: usize, alpha: f64, member: bool) -> f64 {
    assert!(i <= k, "sample index beyond horizon");
    if member {
        let mut sum = 0.0;
        let mut pow = 1.0;
        for _ in i..=k {
            sum += pow;
            pow *= alpha;
        }
        (1.0 - alpha) * sum
    } else {
        alpha.powi((k - i) as i32)
    }
}

/// Normal equations `A θ = r` of the cost over the first `horizon` samples.
///
/// `A = Σ w_{i,k} φᵢᵀφᵢ + α^{N} P0⁻¹` and `r = Σ w_{i,k} φᵢᵀψᵢ + α^{N} P0⁻¹θ0`
/// with `N = horizon` and `k = N − 1`.
pub fn batch_weighted_system(
    spec: &WeightedCostSpec,
    horizon: usize,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    check_alpha(spec.alpha)?;
    check_pd(&spec.p0, "prior covariance P0")?;
    let p = spec.theta0.len();
    if spec.p0.nrows() != p {
        return invalid("prior mean and P0 dimensions differ");
    }
    if horizon > spec.data.len() {
        return invalid(format!(
            "horizon {horizon} exceeds the {} available samples",
            spec.data.len()
        ));
    }
    if let Some(&last) = spec.excitation.iter().next_back() {
        if last >= spec.data.len() {
            return invalid("excitation index outside the data");
        }
    }
    let p0_inv = spec
        .p0
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("P0 factorization failed".into()))?
        .inverse();
    let prior = spec.alpha.powi(horizon as i32);
    let mut a = &p0_inv * prior;
    let mut r = &p0_inv * &spec.theta0 * prior;
    if horizon > 0 {
        let k = horizon - 1;
        for (i, d) in spec.data[..horizon].iter().enumerate() {
            check_datum(d, p)?;
            let w = greedy_weight(i, k, spec.alpha, spec.excitation.contains(&i));
            a += d.phi.transpose() * &d.phi * w;
            r += d.phi.transpose() * &d.psi * w;
        }
    }
    Ok((a, r))
}

/// Unique minimizer of the weighted cost over the first `horizon` samples.
pub fn batch_weighted_solve(spec: &WeightedCostSpec, horizon: usize) -> Result<DVector<f64>> {
    let (a, r) = batch_weighted_system(spec, horizon)?;
    let ch = a
        .cholesky()
        .ok_or_else(|| Error::Numerical("weighted normal matrix is not positive definite".into()))?;
    Ok(ch.solve(&r))
}
