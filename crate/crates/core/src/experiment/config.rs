use serde::{Deserialize, Serialize};

use crate::changepoint::LrtConfig;
use crate::epimodels::{Model, ModelParams, NetworkSpec, ParamSchedule, Topology};
use crate::error::{Error, Result};
use crate::sim::{NoiseConfig, ProcessNoiseKind, TargetKind};

/// One experiment: model, ground truth, simulation, estimators and metrics.
///
/// Every random draw derives from `seed`, so a config fully determines the
/// run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub output_dir: String,
    pub model: Model,
    pub truth: Truth,
    pub sim: SimConfig,
    pub estimators: Vec<EstimatorConfig>,
    #[serde(default)]
    pub metrics: MetricsConfig,
}

/// Where the true parameters come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum Truth {
    /// Explicit piecewise-constant schedule.
    Schedule { schedule: ParamSchedule<ModelParams> },
    /// Constant parameters drawn from a random network.
    Network(NetworkConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub topology: Topology,
    pub n: usize,
    #[serde(default = "default_edge_prob")]
    pub edge_prob: f64,
    #[serde(default = "default_weight_range")]
    pub weight_range: (f64, f64),
    #[serde(default = "default_gamma_range")]
    pub gamma_range: (f64, f64),
}

fn default_edge_prob() -> f64 {
    NetworkSpec::new(Topology::ErdosRenyi, 1, 0).edge_prob
}

fn default_weight_range() -> (f64, f64) {
    NetworkSpec::new(Topology::ErdosRenyi, 1, 0).weight_range
}

fn default_gamma_range() -> (f64, f64) {
    NetworkSpec::new(Topology::ErdosRenyi, 1, 0).gamma_range
}

impl NetworkConfig {
    pub fn spec(&self, seed: u64) -> NetworkSpec {
        NetworkSpec {
            topology: self.topology,
            n: self.n,
            edge_prob: self.edge_prob,
            weight_range: self.weight_range,
            gamma_range: self.gamma_range,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub h: f64,
    /// Number of time points; the stream has one datum fewer.
    pub samples: usize,
    pub x0: Vec<f64>,
    pub process_noise: ProcessNoiseKind,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub obs_rel_std: f64,
    #[serde(default)]
    pub target: TargetKind,
}

impl SimConfig {
    pub fn noise(&self, seed: u64) -> NoiseConfig {
        NoiseConfig {
            process_kind: self.process_noise,
            sigma: self.sigma,
            obs_rel_std: self.obs_rel_std,
            seed,
            target: self.target,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Gwrls,
    Efrls,
    Gradient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    /// Used in output file names; letters, digits, `-` and `_` only.
    pub label: String,
    pub kind: EstimatorKind,
    /// Forgetting factor (RLS kinds).
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Prior covariance scale, `P₀ = ρ·I` (RLS kinds).
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// Initial estimate; zeros when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excitation_cap: Option<usize>,
    /// Wraps the estimator in the resetting change-point scheme.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector: Option<DetectorConfig>,
}

fn default_alpha() -> f64 {
    0.98
}

fn default_rho() -> f64 {
    1e5
}

impl EstimatorConfig {
    pub fn new(label: &str, kind: EstimatorKind, alpha: f64, rho: f64) -> Self {
        Self {
            label: label.to_string(),
            kind,
            alpha,
            rho,
            theta0: None,
            excitation_cap: None,
            detector: None,
        }
    }

    pub fn with_theta0(mut self, theta0: &[f64]) -> Self {
        self.theta0 = Some(theta0.to_vec());
        self
    }

    pub fn with_detector(mut self, detector: DetectorConfig) -> Self {
        self.detector = Some(detector);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub eta: f64,
    pub tau: f64,
    #[serde(default)]
    pub min_samples: usize,
    #[serde(default)]
    pub reset_on_change: bool,
    /// Also return the estimate to `θ₀` on a detection.
    #[serde(default)]
    pub reset_theta: bool,
}

impl DetectorConfig {
    pub fn new(eta: f64, tau: f64) -> Self {
        Self {
            eta,
            tau,
            min_samples: 0,
            reset_on_change: false,
            reset_theta: false,
        }
    }

    pub fn lrt(&self) -> LrtConfig {
        LrtConfig {
            eta: self.eta,
            tau: self.tau,
            min_samples: self.min_samples,
            reset_on_change: self.reset_on_change,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    /// Offset in the relative-error denominator.
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Window length `L` for the moving PI index of the stream.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi_window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rmse: Option<RmseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roc: Option<RocConfig>,
}

fn default_delta() -> f64 {
    crate::metrics::DEFAULT_DELTA
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            delta: default_delta(),
            pi_window: None,
            rmse: None,
            roc: None,
        }
    }
}

/// Evenly spaced grid `min..=max` with `points` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.min + i as f64 * step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RmseConfig {
    pub beta: Grid,
    pub gamma: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RocConfig {
    /// Label of the estimator whose detector is swept; its `eta` and `tau` are overridden.
    pub estimator: String,
    #[serde(default = "default_window")]
    pub window: usize,
    pub etas: Vec<f64>,
    pub taus: Vec<f64>,
    pub trials: usize,
}

fn default_window() -> usize {
    crate::metrics::DEFAULT_ROC_WINDOW
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parameter schedule implied by `truth` (networks are drawn from the root seed).
    pub fn schedule(&self) -> Result<ParamSchedule<ModelParams>> {
        match &self.truth {
            Truth::Schedule { schedule } => Ok(schedule.clone()),
            Truth::Network(net) => {
                let params = crate::epimodels::make_network(&net.spec(self.seed))?;
                Ok(ParamSchedule::constant(0.0, ModelParams::Sir(params)))
            }
        }
    }

    /// Checks every section and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        fn check(errs: &mut Vec<String>, ok: bool, msg: String) {
            if !ok {
                errs.push(msg);
            }
        }
        check(&mut errs, !self.name.trim().is_empty(), "name must not be empty".into());
        check(&mut errs, !self.output_dir.is_empty(), "output_dir must not be empty".into());
        let p = self.model.param_dim();
        let nx = self.model.state_dim();
        if let Model::Sir { nodes } = self.model {
            check(&mut errs, nodes > 0, "model.nodes must be positive".into());
        }

        match &self.truth {
            Truth::Schedule { schedule } => {
                if let Err(e) = schedule.validate() {
                    errs.push(format!("truth.schedule: {e}"));
                }
                for (i, seg) in schedule.segments().iter().enumerate() {
                    if seg.params.model() != self.model {
                        errs.push(format!("truth.schedule[{i}]: parameters do not match the model"));
                    } else if let Err(e) = seg.params.validate() {
                        errs.push(format!("truth.schedule[{i}]: {e}"));
                    }
                }
            }
            Truth::Network(net) => {
                match self.model {
                    Model::Sir { nodes } if nodes == net.n => {}
                    _ => errs.push("truth.network requires an SIR model with the same node count".into()),
                }
                match net.spec(self.seed).validate() {
                    Err(Error::Validation(v)) => errs.extend(v.into_iter().map(|m| format!("truth.network: {m}"))),
                    Err(e) => errs.push(format!("truth.network: {e}")),
                    Ok(()) => {}
                }
            }
        }

        let s = &self.sim;
        check(&mut errs, s.h.is_finite() && s.h > 0.0, format!("sim.h must be positive, got {}", s.h));
        check(&mut errs, s.samples >= 2, format!("sim.samples must be at least 2, got {}", s.samples));
        if s.x0.len() != nx {
            errs.push(format!("sim.x0 has length {}, the model state has {nx}", s.x0.len()));
        } else if let Err(e) = self.model.validate_state(&nalgebra::DVector::from_column_slice(&s.x0)) {
            errs.push(format!("sim.x0: {e}"));
        }
        check(
            &mut errs,
            s.sigma.is_finite() && s.sigma >= 0.0,
            format!("sim.sigma must be nonnegative, got {}", s.sigma),
        );
        check(
            &mut errs,
            s.obs_rel_std.is_finite() && s.obs_rel_std >= 0.0,
            format!("sim.obs_rel_std must be nonnegative, got {}", s.obs_rel_std),
        );

        check(&mut errs, !self.estimators.is_empty(), "at least one estimator is required".into());
        let mut labels = std::collections::BTreeSet::new();
        for (i, e) in self.estimators.iter().enumerate() {
            let at = format!("estimators[{i}]");
            let label_ok = !e.label.is_empty()
                && e.label.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
            check(&mut errs, label_ok, format!("{at}.label {:?} must be non-empty and use [A-Za-z0-9_-]", e.label));
            check(&mut errs, labels.insert(e.label.clone()), format!("{at}.label {:?} is duplicated", e.label));
            if e.kind != EstimatorKind::Gradient {
                check(
                    &mut errs,
                    e.alpha > 0.0 && e.alpha <= 1.0,
                    format!("{at}.alpha must lie in (0, 1], got {}", e.alpha),
                );
                check(
                    &mut errs,
                    e.rho.is_finite() && e.rho > 0.0,
                    format!("{at}.rho must be positive, got {}", e.rho),
                );
            }
            if let Some(t) = &e.theta0 {
                check(&mut errs, t.len() == p, format!("{at}.theta0 has length {}, expected {p}", t.len()));
                check(&mut errs, t.iter().all(|v| v.is_finite()), format!("{at}.theta0 must be finite"));
            }
            if let Some(d) = &e.detector {
                if let Err(err) = d.lrt().validate() {
                    errs.push(format!("{at}.detector: {err}"));
                }
            }
        }

        let m = &self.metrics;
        check(&mut errs, m.delta > 0.0, format!("metrics.delta must be positive, got {}", m.delta));
        if let Some(w) = m.pi_window {
            check(&mut errs, w >= 1, "metrics.pi_window must be at least 1".into());
        }
        if let Some(r) = &m.rmse {
            check(&mut errs, self.model == Model::Sis, "metrics.rmse needs the SIS model".into());
            for (name, g) in [("beta", r.beta), ("gamma", r.gamma)] {
                check(
                    &mut errs,
                    g.points >= 1 && g.min.is_finite() && g.max.is_finite() && g.min <= g.max,
                    format!("metrics.rmse.{name} must have points >= 1 and min <= max"),
                );
            }
        }
        if let Some(r) = &m.roc {
            match self.estimators.iter().find(|e| e.label == r.estimator) {
                Some(e) => check(
                    &mut errs,
                    e.detector.is_some(),
                    format!("metrics.roc.estimator {:?} has no detector", r.estimator),
                ),
                None => errs.push(format!("metrics.roc.estimator {:?} is not defined", r.estimator)),
            }
            check(&mut errs, !r.etas.is_empty(), "metrics.roc.etas must not be empty".into());
            check(&mut errs, !r.taus.is_empty(), "metrics.roc.taus must not be empty".into());
            check(&mut errs, r.trials >= 1, "metrics.roc.trials must be at least 1".into());
            check(
                &mut errs,
                r.etas.iter().all(|v| (0.0..=1.0).contains(v)),
                "metrics.roc.etas must lie in [0, 1]".into(),
            );
            check(
                &mut errs,
                r.taus.iter().all(|v| (0.0..=1.0).contains(v)),
                "metrics.roc.taus must lie in [0, 1]".into(),
            );
            check(
                &mut errs,
                r.taus.windows(2).all(|w| w[0] < w[1]),
                "metrics.roc.taus must be strictly increasing".into(),
            );
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}
