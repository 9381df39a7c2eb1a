use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{EstimatorConfig, EstimatorKind, ExperimentConfig};
use crate::changepoint::{LrtOutcome, ResettingEstimator};
use crate::csvio::{finish, fmt_f64, fmt_opt, writer};
use crate::epimodels::{Model, ModelParams, ParamSchedule};
use crate::error::Result;
use crate::estimators::{Acceptance, EfRls, Estimator, GradientDescent, GwRls, OnlineEstimator, StepInfo};
use crate::metrics::{
    error_profile, match_detections, median, relative_error, rmse_surface, roc_points, write_rmse_surface_csv,
    DetectionCounts, DetectionRun, RocCurve,
};
use crate::rng::{substream, Substream};
use crate::signal::{condition_number, moving_pi, Datum};
use crate::sim::{simulate, Trajectory};

/// Builds the configured estimator for a model with `p` parameters.
pub fn build_estimator(cfg: &EstimatorConfig, p: usize) -> Result<Estimator> {
    let theta0 = match &cfg.theta0 {
        Some(t) => DVector::from_column_slice(t),
        None => DVector::zeros(p),
    };
    Ok(match cfg.kind {
        EstimatorKind::Gwrls => Estimator::GwRls(
            GwRls::with_scaled_identity(theta0, cfg.rho, cfg.alpha)?.with_excitation_cap(cfg.excitation_cap),
        ),
        EstimatorKind::Efrls => Estimator::EfRls(EfRls::with_scaled_identity(theta0, cfg.rho, cfg.alpha)?),
        EstimatorKind::Gradient => Estimator::Gradient(GradientDescent::new(theta0)),
    })
}

/// An estimator, optionally wrapped in the resetting change-point scheme.
#[derive(Debug, Clone)]
pub enum Tracker {
    Plain(Estimator),
    Resetting(ResettingEstimator<Estimator>),
}

impl Tracker {
    pub fn new(cfg: &EstimatorConfig, p: usize) -> Result<Self> {
        let est = build_estimator(cfg, p)?;
        Ok(match &cfg.detector {
            None => Tracker::Plain(est),
            Some(d) => Tracker::Resetting(ResettingEstimator::new(est, d.lrt())?.with_theta_reset(d.reset_theta)),
        })
    }

    pub fn step(&mut self, d: &Datum) -> Result<(StepInfo, Option<LrtOutcome>)> {
        match self {
            Tracker::Plain(e) => Ok((e.step(d)?, None)),
            Tracker::Resetting(r) => {
                let s = r.step(d)?;
                Ok((s.info, Some(s.lrt)))
            }
        }
    }

    pub fn estimator(&self) -> &Estimator {
        match self {
            Tracker::Plain(e) => e,
            Tracker::Resetting(r) => r.inner(),
        }
    }
}

/// Index of the first datum at or after each switch time.
pub fn change_point_indices(schedule: &ParamSchedule<ModelParams>, h: f64, data_len: usize) -> Vec<usize> {
    let t0 = schedule.start();
    schedule
        .switch_times()
        .into_iter()
        .map(|ts| ((ts - t0) / h - 1e-9).ceil().max(0.0) as usize)
        .filter(|&k| k < data_len)
        .collect()
}

/// Positions of the infection-rate entries of `θ`.
pub fn infection_indices(model: Model) -> std::ops::Range<usize> {
    match model {
        Model::Sis => 0..1,
        Model::Sir { nodes } => 0..nodes * nodes,
    }
}

/// Per-step record of one estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub theta: DVector<f64>,
    pub rel_err: DVector<f64>,
    pub kappa_p: Option<f64>,
    pub kappa_he: Option<f64>,
    pub acceptance: Option<Acceptance>,
    pub lrt: Option<LrtOutcome>,
}

/// Runs one estimator over a trajectory's stream.
pub fn track(cfg: &EstimatorConfig, traj: &Trajectory, delta: f64) -> Result<Vec<StepRecord>> {
    let p = traj.model.param_dim();
    let mut tracker = Tracker::new(cfg, p)?;
    let mut out = Vec::with_capacity(traj.data.len());
    for (d, truth) in traj.data.iter().zip(&traj.theta_true) {
        let (info, lrt) = tracker.step(d)?;
        let est = tracker.estimator();
        let theta = est.theta().clone();
        let kappa_p = est.covariance().map(condition_number).transpose()?;
        out.push(StepRecord {
            rel_err: relative_error(truth, &theta, delta)?,
            theta,
            kappa_p,
            kappa_he: est.excitation_kappa(),
            acceptance: info.acceptance,
            lrt,
        });
    }
    Ok(out)
}

/// Detection indices for one detector setting on one stream.
pub fn detections(cfg: &EstimatorConfig, data: &[Datum], p: usize) -> Result<Vec<usize>> {
    let mut tracker = Tracker::new(cfg, p)?;
    let mut found = Vec::new();
    for d in data {
        if let (_, Some(lrt)) = tracker.step(d)? {
            if lrt.detected {
                found.push(d.k);
            }
        }
    }
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub label: String,
    pub final_theta: Vec<f64>,
    pub final_relative_error: Vec<f64>,
    pub final_median_error: f64,
    pub final_max_error: f64,
    /// Median relative error over the infection-rate entries (`β` or `vec(B)`).
    pub final_infection_median_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_r0_median_error: Option<f64>,
    /// Time average, per schedule segment, of the infection-rate median error.
    pub segment_infection_error: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_kappa_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_kappa_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_kappa_he: Option<f64>,
    pub excitation_set_size: usize,
    pub detections: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detection_counts: Option<DetectionCounts>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocSummary {
    pub eta: f64,
    pub auc: f64,
    pub curve: RocCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub seed: u64,
    pub samples: usize,
    pub clamp_events: usize,
    pub change_points: Vec<usize>,
    pub theta_true_final: Vec<f64>,
    pub estimators: Vec<EstimatorSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub roc: Vec<RocSummary>,
}

impl RunSummary {
    pub fn estimator(&self, label: &str) -> Option<&EstimatorSummary> {
        self.estimators.iter().find(|e| e.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub name: String,
    pub seed: u64,
    pub config_sha256: String,
    pub files: Vec<ManifestEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Files produced by a run, kept in memory until written.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut paths = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            fs::write(&path, bytes)?;
            paths.push(path);
        }
        Ok(paths)
    }
}

fn estimates_csv(traj: &Trajectory, records: &[StepRecord]) -> Result<Vec<u8>> {
    let p = traj.model.param_dim();
    let mut buf = Vec::new();
    let mut out = writer(&mut buf);
    let mut header = vec!["k".to_string(), "t".to_string()];
    header.extend((0..p).map(|i| format!("theta{i}")));
    header.extend((0..p).map(|i| format!("relerr{i}")));
    header.extend(["kappa_p", "kappa_he", "acceptance", "detected"].map(String::from));
    out.write_record(&header)?;
    for (d, r) in traj.data.iter().zip(records) {
        let mut row = vec![d.k.to_string(), fmt_f64(d.t)];
        row.extend(r.theta.iter().map(|&v| fmt_f64(v)));
        row.extend(r.rel_err.iter().map(|&v| fmt_f64(v)));
        row.push(fmt_opt(r.kappa_p));
        row.push(fmt_opt(r.kappa_he));
        row.push(
            match r.acceptance {
                Some(Acceptance::Accepted) => "accepted",
                Some(Acceptance::Rejected) => "rejected",
                Some(Acceptance::Skipped) => "skipped",
                None => "",
            }
            .to_string(),
        );
        row.push(r.lrt.map(|l| u8::from(l.detected).to_string()).unwrap_or_default());
        out.write_record(&row)?;
    }
    finish(out)?;
    Ok(buf)
}

fn detections_csv(traj: &Trajectory, records: &[StepRecord]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut out = writer(&mut buf);
    out.write_record(["k", "t", "Y", "Z", "E", "D", "p", "detected"])?;
    for (d, r) in traj.data.iter().zip(records) {
        if let Some(l) = r.lrt {
            out.write_record([
                d.k.to_string(),
                fmt_f64(d.t),
                fmt_f64(l.y),
                fmt_opt(l.z_prev),
                fmt_opt(l.e),
                fmt_opt(l.d),
                fmt_opt(l.p),
                u8::from(l.detected).to_string(),
            ])?;
        }
    }
    finish(out)?;
    Ok(buf)
}

fn r0_median_error(model: Model, truth: &DVector<f64>, hat: &DVector<f64>, delta: f64) -> Option<f64> {
    let t = model.params_from_theta(truth).ok()?.r0().ok()?;
    let h = model.params_from_theta(hat).ok()?.r0().ok()?;
    relative_error(&t, &h, delta).ok().map(|e| median(e.as_slice()))
}

fn summarize(
    cfg: &EstimatorConfig,
    traj: &Trajectory,
    schedule: &ParamSchedule<ModelParams>,
    records: &[StepRecord],
    cps: &[usize],
    window: usize,
    delta: f64,
) -> Result<EstimatorSummary> {
    let model = traj.model;
    let infect = infection_indices(model);
    let last = records.last().expect("streams have at least one datum");
    let truth = traj.theta_true.last().expect("streams have at least one datum");

    let nseg = schedule.segments().len();
    let (mut sums, mut counts) = (vec![0.0; nseg], vec![0usize; nseg]);
    for (d, r) in traj.data.iter().zip(records) {
        let seg = schedule
            .segments()
            .iter()
            .rposition(|s| s.t_start <= d.t)
            .unwrap_or(0);
        sums[seg] += median(&r.rel_err.as_slice()[infect.clone()]);
        counts[seg] += 1;
    }
    let segment_infection_error = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| if c == 0 { f64::NAN } else { s / c as f64 })
        .collect();

    let kappas: Vec<f64> = records.iter().filter_map(|r| r.kappa_p).collect();
    let found: Vec<usize> = traj
        .data
        .iter()
        .zip(records)
        .filter(|(_, r)| r.lrt.is_some_and(|l| l.detected))
        .map(|(d, _)| d.k)
        .collect();
    // Counts are undefined when switches sit closer together than the matching window.
    let detection_counts = cfg
        .detector
        .and_then(|_| match_detections(&found, cps, window, traj.data.len()).ok());
    let excitation_set_size = records
        .iter()
        .filter(|r| r.acceptance == Some(Acceptance::Accepted))
        .count();

    Ok(EstimatorSummary {
        label: cfg.label.clone(),
        final_theta: last.theta.as_slice().to_vec(),
        final_relative_error: last.rel_err.as_slice().to_vec(),
        final_median_error: median(last.rel_err.as_slice()),
        final_max_error: last.rel_err.max(),
        final_infection_median_error: median(&last.rel_err.as_slice()[infect]),
        final_r0_median_error: r0_median_error(model, truth, &last.theta, delta),
        segment_infection_error,
        final_kappa_p: last.kappa_p,
        min_kappa_p: kappas.iter().copied().reduce(f64::min),
        final_kappa_he: last.kappa_he,
        excitation_set_size,
        detections: found,
        detection_counts,
    })
}

fn roc_sweep(config: &ExperimentConfig, schedule: &ParamSchedule<ModelParams>) -> Result<Vec<RocSummary>> {
    let Some(roc) = &config.metrics.roc else {
        return Ok(Vec::new());
    };
    let base = config
        .estimators
        .iter()
        .find(|e| e.label == roc.estimator)
        .expect("validated");
    let mut seeds = substream(config.seed, Substream::Trials);
    let trial_seeds: Vec<u64> = (0..roc.trials).map(|_| seeds.random()).collect();
    let x0 = DVector::from_column_slice(&config.sim.x0);
    let streams = trial_seeds
        .iter()
        .map(|&s| simulate(config.model, schedule, &x0, config.sim.h, config.sim.samples, &config.sim.noise(s)))
        .collect::<Result<Vec<_>>>()?;
    let cps = change_point_indices(schedule, config.sim.h, config.sim.samples - 1);
    let p = config.model.param_dim();

    let mut out = Vec::with_capacity(roc.etas.len());
    for &eta in &roc.etas {
        let curve = roc_points(&cps, roc.window, eta, &roc.taus, |tau| {
            let mut cfg = base.clone();
            let mut det = cfg.detector.expect("validated");
            det.eta = eta;
            det.tau = tau;
            cfg.detector = Some(det);
            streams
                .iter()
                .map(|traj| {
                    Ok(DetectionRun {
                        detections: detections(&cfg, &traj.data, p)?,
                        samples: traj.data.len(),
                    })
                })
                .collect()
        })?;
        out.push(RocSummary {
            eta,
            auc: curve.auc(),
            curve,
        });
    }
    Ok(out)
}

/// Runs the experiment in memory and returns its files and summary.
pub fn execute(config: &ExperimentConfig) -> Result<(RunSummary, Artifacts)> {
    config.validate()?;
    let schedule = config.schedule()?;
    let x0 = DVector::from_column_slice(&config.sim.x0);
    let traj = simulate(
        config.model,
        &schedule,
        &x0,
        config.sim.h,
        config.sim.samples,
        &config.sim.noise(config.seed),
    )?;
    let cps = change_point_indices(&schedule, config.sim.h, traj.data.len());
    let delta = config.metrics.delta;
    let window = config
        .metrics
        .roc
        .as_ref()
        .map_or(crate::metrics::DEFAULT_ROC_WINDOW, |r| r.window);

    let mut art = Artifacts::default();
    let mut buf = Vec::new();
    traj.write_csv(&mut buf)?;
    art.add("trajectory.csv", buf);

    let mut summaries = Vec::with_capacity(config.estimators.len());
    for cfg in &config.estimators {
        let records = track(cfg, &traj, delta)?;
        art.add(format!("estimates_{}.csv", cfg.label), estimates_csv(&traj, &records)?);
        if records[0].rel_err.len() > 1 {
            let series = error_profile(
                traj.data
                    .iter()
                    .zip(&records)
                    .map(|(d, r)| (d.k, d.t, r.rel_err.clone())),
            )?;
            let mut buf = Vec::new();
            series.write_csv(&mut buf)?;
            art.add(format!("errors_{}.csv", cfg.label), buf);
        }
        if cfg.detector.is_some() {
            art.add(format!("detections_{}.csv", cfg.label), detections_csv(&traj, &records)?);
        }
        summaries.push(summarize(cfg, &traj, &schedule, &records, &cps, window, delta)?);
    }

    if let Some(w) = config.metrics.pi_window {
        let reports = moving_pi(&traj.data, w)?;
        let mut buf = Vec::new();
        let mut out = writer(&mut buf);
        out.write_record(["k_start", "k_end", "kappa", "lambda_min", "lambda_max"])?;
        for r in &reports {
            out.write_record([
                r.window.0.to_string(),
                r.window.1.to_string(),
                fmt_f64(r.kappa),
                fmt_f64(r.lambda_min),
                fmt_f64(r.lambda_max),
            ])?;
        }
        finish(out)?;
        art.add("pi.csv", buf);
    }

    if let Some(r) = &config.metrics.rmse {
        let (b, g) = (r.beta.values(), r.gamma.values());
        let surface: DMatrix<f64> = rmse_surface(&traj.data, &b, &g)?;
        let mut buf = Vec::new();
        write_rmse_surface_csv(&mut buf, &b, &g, &surface)?;
        art.add("rmse_surface.csv", buf);
    }

    let roc = roc_sweep(config, &schedule)?;
    for r in &roc {
        let mut buf = Vec::new();
        r.curve.write_csv(&mut buf)?;
        art.add(format!("roc_eta_{}.csv", r.eta), buf);
    }

    let summary = RunSummary {
        name: config.name.clone(),
        seed: config.seed,
        samples: config.sim.samples,
        clamp_events: traj.clamp_events,
        change_points: cps,
        theta_true_final: traj.theta_true.last().map(|t| t.as_slice().to_vec()).unwrap_or_default(),
        estimators: summaries,
        roc,
    };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    art.add("summary.json", text.into_bytes());
    let mut text = config.to_json()?;
    text.push('\n');
    art.add("config.json", text.into_bytes());

    let manifest = Manifest {
        name: config.name.clone(),
        seed: config.seed,
        config_sha256: sha256_hex(config.to_json()?.as_bytes()),
        files: art
            .files
            .iter()
            .map(|(n, b)| ManifestEntry {
                file: n.clone(),
                sha256: sha256_hex(b),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    art.add("manifest.json", text.into_bytes());
    Ok((summary, art))
}

/// Runs the experiment and writes its files to `config.output_dir`.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    let (summary, art) = execute(config)?;
    art.write_to(Path::new(&config.output_dir))?;
    Ok(summary)
}
