//! Estimation and detection metrics.

use std::io::Write;
use std::ops::AddAssign;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::csvio::{finish, fmt_f64, writer};
use crate::epimodels::{local_r0, SirNetworkParams};
use crate::error::{invalid, Result};
use crate::signal::Datum;

pub const DEFAULT_DELTA: f64 = 1e-2;
pub const DEFAULT_ROC_WINDOW: usize = 10;

/// `|θ − θ̂| / |θ + δ|`, componentwise.
pub fn relative_error(theta_true: &DVector<f64>, theta_hat: &DVector<f64>, delta: f64) -> Result<DVector<f64>> {
    if theta_true.len() != theta_hat.len() {
        return invalid(format!(
            "parameter lengths differ: {} vs {}",
            theta_true.len(),
            theta_hat.len()
        ));
    }
    if delta.is_nan() || delta <= 0.0 {
        return invalid(format!("delta must be positive, got {delta}"));
    }
    Ok(theta_true.zip_map(theta_hat, |t, e| ((t - e) / (t + delta)).abs()))
}

/// Relative error of the local reproduction numbers.
pub fn r0_error(p_true: &SirNetworkParams, p_hat: &SirNetworkParams, delta: f64) -> Result<DVector<f64>> {
    relative_error(&local_r0(p_true)?, &local_r0(p_hat)?, delta)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Envelope and median of the relative errors over time.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    pub k: Vec<usize>,
    pub times: Vec<f64>,
    pub errors: Vec<DVector<f64>>,
    pub min: Vec<f64>,
    pub median: Vec<f64>,
    pub max: Vec<f64>,
}

impl ErrorSeries {
    /// Columns `k, t, min, median, max`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = writer(w);
        out.write_record(["k", "t", "min", "median", "max"])?;
        for i in 0..self.times.len() {
            out.write_record([
                self.k[i].to_string(),
                fmt_f64(self.times[i]),
                fmt_f64(self.min[i]),
                fmt_f64(self.median[i]),
                fmt_f64(self.max[i]),
            ])?;
        }
        finish(out)
    }

    pub fn final_median(&self) -> Option<f64> {
        self.median.last().copied()
    }
}

/// Builds the error profile from `(k, t, errors)` samples; needs at least two parameters.
pub fn error_profile(samples: impl IntoIterator<Item = (usize, f64, DVector<f64>)>) -> Result<ErrorSeries> {
    let mut s = ErrorSeries {
        k: Vec::new(),
        times: Vec::new(),
        errors: Vec::new(),
        min: Vec::new(),
        median: Vec::new(),
        max: Vec::new(),
    };
    for (k, t, e) in samples {
        if e.len() < 2 {
            return invalid("an error profile needs at least two parameters");
        }
        s.k.push(k);
        s.times.push(t);
        s.min.push(e.min());
        s.max.push(e.max());
        s.median.push(median(e.as_slice()));
        s.errors.push(e);
    }
    Ok(s)
}

/// RMSE of `ψ − φ·[β, γ]ᵀ` over the stream for every grid point; rows follow `beta_grid`.
pub fn rmse_surface(stream: &[Datum], beta_grid: &[f64], gamma_grid: &[f64]) -> Result<DMatrix<f64>> {
    if stream.is_empty() || beta_grid.is_empty() || gamma_grid.is_empty() {
        return invalid("stream and grids must be non-empty");
    }
    if let Some(d) = stream.iter().find(|d| d.dim() != 2) {
        return invalid(format!("RMSE surface needs two parameters, datum {} has {}", d.k, d.dim()));
    }
    let count: usize = stream.iter().map(|d| d.psi.len()).sum();
    let mut out = DMatrix::zeros(beta_grid.len(), gamma_grid.len());
    for (i, &b) in beta_grid.iter().enumerate() {
        for (j, &g) in gamma_grid.iter().enumerate() {
            let theta = DVector::from_vec(vec![b, g]);
            let sse: f64 = stream.iter().map(|d| d.residual(&theta).norm_squared()).sum();
            out[(i, j)] = (sse / count as f64).sqrt();
        }
    }
    Ok(out)
}

/// Columns `beta, gamma, rmse`.
pub fn write_rmse_surface_csv<W: Write>(
    w: W,
    beta_grid: &[f64],
    gamma_grid: &[f64],
    surface: &DMatrix<f64>,
) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["beta", "gamma", "rmse"])?;
    for (i, &b) in beta_grid.iter().enumerate() {
        for (j, &g) in gamma_grid.iter().enumerate() {
            out.write_record([fmt_f64(b), fmt_f64(g), fmt_f64(surface[(i, j)])])?;
        }
    }
    finish(out)
}

/// Detection outcome counts against known change points.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DetectionCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// Samples the detector was run on.
    pub samples: usize,
}

impl DetectionCounts {
    pub fn tpr(&self) -> f64 {
        let pos = self.tp + self.fn_;
        if pos == 0 {
            0.0
        } else {
            self.tp as f64 / pos as f64
        }
    }

    pub fn fp_rate(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.fp as f64 / self.samples as f64
        }
    }
}

impl AddAssign for DetectionCounts {
    fn add_assign(&mut self, o: Self) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
        self.samples += o.samples;
    }
}

fn check_change_points(true_cps: &[usize], window: usize) -> Result<()> {
    for w in true_cps.windows(2) {
        if w[1] <= w[0] {
            return invalid("change points must be strictly increasing");
        }
        if w[1] - w[0] <= window {
            return invalid(format!(
                "change points {} and {} are closer than the matching window {window}",
                w[0], w[1]
            ));
        }
    }
    Ok(())
}

/// Matches detection indices to change points: the first detection in
/// `[cp, cp + window]` is a hit, later ones in that window are ignored and
/// detections outside every window are false positives.
pub fn match_detections(
    detections: &[usize],
    true_cps: &[usize],
    window: usize,
    samples: usize,
) -> Result<DetectionCounts> {
    check_change_points(true_cps, window)?;
    let mut hit = vec![false; true_cps.len()];
    let mut counts = DetectionCounts {
        samples,
        ..Default::default()
    };
    for &k in detections {
        match true_cps.iter().position(|&cp| k >= cp && k <= cp + window) {
            Some(i) => {
                if !hit[i] {
                    hit[i] = true;
                    counts.tp += 1;
                }
            }
            None => counts.fp += 1,
        }
    }
    counts.fn_ = hit.iter().filter(|h| !**h).count();
    Ok(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    pub tau: f64,
    pub counts: DetectionCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    pub eta: f64,
    pub window: usize,
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    /// Trapezoid area under `(fp_rate, tpr)`, anchored at `(0, 0)` and `(1, 1)`.
    pub fn auc(&self) -> f64 {
        let mut pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .map(|p| (p.counts.fp_rate(), p.counts.tpr()))
            .collect();
        pts.push((0.0, 0.0));
        pts.push((1.0, 1.0));
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        pts.windows(2)
            .map(|w| (w[1].0 - w[0].0) * 0.5 * (w[0].1 + w[1].1))
            .sum()
    }

    /// Columns `tau, tp, fp, fn, tpr, fp_rate`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = writer(w);
        out.write_record(["tau", "tp", "fp", "fn", "tpr", "fp_rate"])?;
        for p in &self.points {
            let c = p.counts;
            out.write_record([
                fmt_f64(p.tau),
                c.tp.to_string(),
                c.fp.to_string(),
                c.fn_.to_string(),
                fmt_f64(c.tpr()),
                fmt_f64(c.fp_rate()),
            ])?;
        }
        finish(out)
    }
}

/// Detections from one run: indices at which a change was reported, and
/// the number of samples processed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DetectionRun {
    pub detections: Vec<usize>,
    pub samples: usize,
}

/// Sweeps `tau_grid`; `runner(τ)` re-runs detection on every trial and the
/// counts are pooled across trials.
pub fn roc_points<F>(true_cps: &[usize], window: usize, eta: f64, tau_grid: &[f64], mut runner: F) -> Result<RocCurve>
where
    F: FnMut(f64) -> Result<Vec<DetectionRun>>,
{
    check_change_points(true_cps, window)?;
    let mut points = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        let mut counts = DetectionCounts::default();
        for run in runner(tau)? {
            counts += match_detections(&run.detections, true_cps, window, run.samples)?;
        }
        points.push(RocPoint { tau, counts });
    }
    Ok(RocCurve { eta, window, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn relative_error_examples() {
        let t = v(&[1.0, 0.0]);
        assert_eq!(relative_error(&t, &t, 0.01).unwrap(), v(&[0.0, 0.0]));
        let e = relative_error(&t, &v(&[0.9, 0.005]), 0.01).unwrap();
        assert_relative_eq!(e[0], 0.1 / 1.01, epsilon = 1e-15);
        assert_relative_eq!(e[1], 0.5, epsilon = 1e-15);
        assert!((e[0] - 0.09901).abs() < 1e-5);
        assert!(relative_error(&t, &v(&[1.0]), 0.01).is_err());
        assert!(relative_error(&t, &t, 0.0).is_err());
    }

    #[test]
    fn r0_error_is_scale_invariant() {
        let truth = SirNetworkParams::new(DMatrix::from_element(1, 1, 0.12), v(&[0.04])).unwrap();
        let hat = SirNetworkParams::new(DMatrix::from_element(1, 1, 0.24), v(&[0.08])).unwrap();
        assert_relative_eq!(r0_error(&truth, &hat, 0.01).unwrap()[0], 0.0, epsilon = 1e-14);
        assert_eq!(r0_error(&truth, &truth, 0.01).unwrap()[0], 0.0);
    }

    #[test]
    fn profile_examples() {
        let s = error_profile(vec![
            (0, 0.0, v(&[0.1, 0.3])),
            (1, 0.1, v(&[0.2, 0.2])),
        ])
        .unwrap();
        assert_eq!((s.min[0], s.max[0]), (0.1, 0.3));
        assert_relative_eq!(s.median[0], 0.2);
        assert_eq!((s.min[1], s.median[1], s.max[1]), (0.2, 0.2, 0.2));
        assert!(error_profile(vec![(0, 0.0, v(&[0.1]))]).is_err());
    }

    #[test]
    fn profile_of_decreasing_errors_is_decreasing() {
        let s = error_profile((0..20).map(|k| {
            let f = 0.9f64.powi(k as i32);
            (k, k as f64, v(&[f, 2.0 * f, 3.0 * f]))
        }))
        .unwrap();
        for w in s.min.windows(2).chain(s.max.windows(2)) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn error_series_csv_header() {
        let s = error_profile(vec![(3, 0.5, v(&[0.1, 0.3]))]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,t,min,median,max\r\n3,5.0000000000000000e-1,"));
    }

    fn sis_stream() -> Vec<Datum> {
        let (beta, gamma, h) = (0.12, 0.04, 0.1);
        let mut i: f64 = 0.01;
        let mut out = Vec::new();
        for k in 0..400 {
            let phi = [(1.0 - i) * i, -i];
            let psi = phi[0] * beta + phi[1] * gamma;
            out.push(Datum::scalar(k, k as f64 * h, &phi, psi).unwrap());
            i += h * psi;
        }
        out
    }

    #[test]
    fn rmse_surface_valley() {
        let data = sis_stream();
        let s = rmse_surface(&data, &[0.12, 1.2], &[0.04, 0.4]).unwrap();
        assert!(s[(0, 0)] < 1e-15);
        assert!(s[(1, 1)] > s[(0, 0)]);
        // Points at equal distance from the truth: on the β/γ = 3 ray vs. perpendicular to it.
        let dir = v(&[3.0, 1.0]).normalize() * 0.02;
        let perp = v(&[-1.0, 3.0]).normalize() * 0.02;
        let on = rmse_surface(&data, &[0.12 + dir[0]], &[0.04 + dir[1]]).unwrap()[(0, 0)];
        let off = rmse_surface(&data, &[0.12 + perp[0]], &[0.04 + perp[1]]).unwrap()[(0, 0)];
        assert!(on < off, "on-ray {on} vs off-ray {off}");
        assert!(rmse_surface(&[], &[0.1], &[0.1]).is_err());
    }

    #[test]
    fn matching_rules() {
        let cps = [50, 100, 150];
        let exact = match_detections(&cps, &cps, 10, 200).unwrap();
        assert_eq!((exact.tp, exact.fp, exact.fn_), (3, 0, 0));
        assert_eq!(exact.tpr(), 1.0);
        let none = match_detections(&[], &cps, 10, 200).unwrap();
        assert_eq!((none.tpr(), none.fn_), (0.0, 3));
        let mixed = match_detections(&[10, 52, 55, 160, 170], &cps, 10, 200).unwrap();
        assert_eq!((mixed.tp, mixed.fp, mixed.fn_), (2, 2, 1));
        assert_relative_eq!(mixed.fp_rate(), 0.01);
        assert!(match_detections(&[], &[50, 55], 10, 200).is_err());
        assert!(match_detections(&[], &[50, 50], 0, 200).is_err());
    }

    #[test]
    fn roc_sweep_and_auc() {
        let cps = [50, 100];
        let curve = roc_points(&cps, 10, 0.3, &[0.0, 0.5, 1.0], |tau| {
            let detections = if tau == 0.0 {
                vec![]
            } else if tau < 1.0 {
                vec![51]
            } else {
                (0..200).collect()
            };
            Ok(vec![DetectionRun {
                detections,
                samples: 200,
            }])
        })
        .unwrap();
        let tprs: Vec<f64> = curve.points.iter().map(|p| p.counts.tpr()).collect();
        assert_eq!(tprs, vec![0.0, 0.5, 1.0]);
        assert_eq!(curve.points[2].counts.fp, 178);
        let perfect = RocCurve {
            eta: 0.3,
            window: 10,
            points: vec![RocPoint {
                tau: 0.1,
                counts: DetectionCounts {
                    tp: 2,
                    fp: 0,
                    fn_: 0,
                    samples: 100,
                },
            }],
        };
        assert_relative_eq!(perfect.auc(), 1.0);
        let blind = RocCurve {
            points: vec![],
            ..perfect.clone()
        };
        assert_relative_eq!(blind.auc(), 0.5);
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("tau,tp,fp,fn,tpr,fp_rate\r\n"));
    }

    proptest! {
        #[test]
        fn relative_error_homogeneous(t in prop::collection::vec(0.0f64..10.0, 1..6), e in prop::collection::vec(-1.0f64..1.0, 6), c in 0.1f64..10.0) {
            let n = t.len();
            let truth = v(&t);
            let err = v(&e[..n]);
            let base = relative_error(&truth, &(&truth + &err), 0.01).unwrap();
            // Scaling (θ + δ) and the deviation by c leaves the ratio unchanged.
            let scaled_truth = truth.map(|x| c * (x + 0.01) - 0.01);
            let scaled = relative_error(&scaled_truth, &(&scaled_truth + &err * c), 0.01).unwrap();
            for i in 0..n {
                prop_assert!((base[i] - scaled[i]).abs() <= 1e-9 * (1.0 + base[i]));
            }
        }

        #[test]
        fn envelope_contains_median(rows in prop::collection::vec(prop::collection::vec(0.0f64..5.0, 2..8), 1..10)) {
            let s = error_profile(rows.iter().enumerate().map(|(k, r)| (k, k as f64, v(r)))).unwrap();
            for i in 0..s.times.len() {
                prop_assert!(s.min[i] <= s.median[i] && s.median[i] <= s.max[i]);
            }
        }
    }
}
