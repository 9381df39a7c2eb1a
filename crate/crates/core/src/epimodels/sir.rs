use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::signal::all_finite;

/// Infection-rate matrix `B` and recovery rates `γ` of an `n`-node SIR network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SirParamsRepr", into = "SirParamsRepr")]
pub struct SirNetworkParams {
    pub b: DMatrix<f64>,
    pub gamma: DVector<f64>,
}

#[derive(Serialize, Deserialize)]
struct SirParamsRepr {
    /// Row-major rows of `B`.
    b: Vec<Vec<f64>>,
    gamma: Vec<f64>,
}

impl TryFrom<SirParamsRepr> for SirNetworkParams {
    type Error = crate::Error;

    fn try_from(r: SirParamsRepr) -> Result<Self> {
        let n = r.gamma.len();
        if r.b.len() != n || r.b.iter().any(|row| row.len() != n) {
            return invalid("B must be n×n with n = len(gamma)");
        }
        let params = SirNetworkParams {
            b: DMatrix::from_fn(n, n, |i, j| r.b[i][j]),
            gamma: DVector::from_vec(r.gamma),
        };
        params.validate()?;
        Ok(params)
    }
}

impl From<SirNetworkParams> for SirParamsRepr {
    fn from(p: SirNetworkParams) -> Self {
        SirParamsRepr {
            b: p.b.row_iter().map(|row| row.iter().copied().collect()).collect(),
            gamma: p.gamma.iter().copied().collect(),
        }
    }
}

impl SirNetworkParams {
    pub fn new(b: DMatrix<f64>, gamma: DVector<f64>) -> Result<Self> {
        let p = Self { b, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn nodes(&self) -> usize {
        self.gamma.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.gamma.len();
        if n == 0 || self.b.nrows() != n || self.b.ncols() != n {
            return invalid("B must be a nonempty n×n matrix with n = len(gamma)");
        }
        if !all_finite(self.b.iter()) || !all_finite(self.gamma.iter()) {
            return invalid("SIR rates must be finite");
        }
        if self.b.iter().chain(self.gamma.iter()).any(|&v| v < 0.0) {
            return invalid("SIR rates must be nonnegative");
        }
        Ok(())
    }

    /// `[vec(B), γ]` with columns of `B` stacked.
    pub fn theta(&self) -> DVector<f64> {
        let mut v: Vec<f64> = self.b.as_slice().to_vec(); // nalgebra stores column-major
        v.extend(self.gamma.iter());
        DVector::from_vec(v)
    }

    pub(crate) fn from_theta_unchecked(n: usize, theta: &DVector<f64>) -> Self {
        Self {
            b: DMatrix::from_column_slice(n, n, &theta.as_slice()[..n * n]),
            gamma: DVector::from_column_slice(&theta.as_slice()[n * n..]),
        }
    }
}

pub(crate) fn check_simplex(i: &DVector<f64>, r: &DVector<f64>) -> Result<()> {
    if i.len() != r.len() {
        return invalid("I and R must have equal length");
    }
    for (k, (&a, &b)) in i.iter().zip(r.iter()).enumerate() {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a + b > 1.0 + 1e-12 {
            return invalid(format!("node {k}: (I, R) = ({a}, {b}) leaves the simplex"));
        }
    }
    Ok(())
}

/// `2n × (n² + n)` regressor
/// `[[Iᵀ ⊗ diag(1 − I − R), −diag(I)], [0, diag(I)]]`.
pub fn sir_regressor(i: &DVector<f64>, r: &DVector<f64>) -> Result<DMatrix<f64>> {
    check_simplex(i, r)?;
    let n = i.len();
    let mut phi = DMatrix::zeros(2 * n, n * n + n);
    for j in 0..n {
        for row in 0..n {
            let s = 1.0 - i[row] - r[row];
            phi[(row, j * n + row)] = i[j] * s;
        }
    }
    for row in 0..n {
        phi[(row, n * n + row)] = -i[row];
        phi[(n + row, n * n + row)] = i[row];
    }
    Ok(phi)
}

/// Stacked `[İ; Ṙ]` with `İ = diag(1 − I − R)·B·I − diag(γ)·I`, `Ṙ = diag(γ)·I`.
pub fn sir_drift(i: &DVector<f64>, r: &DVector<f64>, p: &SirNetworkParams) -> Result<DVector<f64>> {
    check_simplex(i, r)?;
    let n = i.len();
    if p.nodes() != n {
        return invalid("state and parameter node counts differ");
    }
    let pressure = &p.b * i;
    let mut out = DVector::zeros(2 * n);
    for k in 0..n {
        let recovery = p.gamma[k] * i[k];
        out[k] = (1.0 - i[k] - r[k]) * pressure[k] - recovery;
        out[n + k] = recovery;
    }
    Ok(out)
}

/// Local basic reproduction numbers, the row sums of `diag(γ)⁻¹B`.
pub fn local_r0(p: &SirNetworkParams) -> Result<DVector<f64>> {
    if p.gamma.iter().any(|&g| g <= 0.0) {
        return invalid("local reproduction numbers need positive recovery rates");
    }
    Ok(DVector::from_fn(p.nodes(), |row, _| p.b.row(row).sum() / p.gamma[row]))
}
