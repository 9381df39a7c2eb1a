//! Named experiment configurations.

use nalgebra::{DMatrix, DVector};

use super::config::*;
use crate::epimodels::{Model, ModelParams, ParamSchedule, Segment, SirNetworkParams, SisParams, Topology};
use crate::sim::{ProcessNoiseKind, TargetKind};

pub const PRESET_NAMES: [&str; 9] = [
    "sis-basic",
    "sis-contour",
    "sis-windup",
    "sir-network-fc",
    "sir-network-star",
    "sir-network-er",
    "sir-changepoint",
    "roc-sweep",
    "sis-changepoint",
];

/// Default root seed of every preset.
pub const DEFAULT_SEED: u64 = 7;

/// Switch times of the two-node change-point scenario.
pub const CHANGEPOINT_SWITCHES: [f64; 3] = [15.0, 30.0, 49.0];

/// τ grid swept by `roc-sweep`.
pub const ROC_TAUS: [f64; 10] = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.5, 1.0];

/// η values swept by `roc-sweep`.
pub const ROC_ETAS: [f64; 4] = [0.1, 0.3, 0.5, 1.0];

fn sis_schedule(beta: f64, gamma: f64) -> Truth {
    Truth::Schedule {
        schedule: ParamSchedule::constant(0.0, ModelParams::Sis(SisParams { beta, gamma })),
    }
}

fn noiseless(h: f64, samples: usize, x0: Vec<f64>) -> SimConfig {
    SimConfig {
        h,
        samples,
        x0,
        process_noise: ProcessNoiseKind::None,
        sigma: 0.0,
        obs_rel_std: 0.0,
        target: TargetKind::FiniteDifference,
    }
}

fn base(name: &str, model: Model, truth: Truth, sim: SimConfig, estimators: Vec<EstimatorConfig>) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        seed: DEFAULT_SEED,
        output_dir: format!("out/{name}"),
        model,
        truth,
        sim,
        estimators,
        metrics: MetricsConfig::default(),
    }
}

fn rls_pair(alpha: f64, rho: f64, theta0: Option<&[f64]>) -> Vec<EstimatorConfig> {
    [("gwrls", EstimatorKind::Gwrls), ("efrls", EstimatorKind::Efrls)]
        .into_iter()
        .map(|(label, kind)| {
            let e = EstimatorConfig::new(label, kind, alpha, rho);
            match theta0 {
                Some(t) => e.with_theta0(t),
                None => e,
            }
        })
        .collect()
}

fn sis_basic() -> ExperimentConfig {
    base(
        "sis-basic",
        Model::Sis,
        sis_schedule(0.8076, 0.2692),
        noiseless(0.1, 1001, vec![0.01]),
        rls_pair(0.98, 1e5, Some(&[1.0, 1.0])),
    )
}

fn sis_contour() -> ExperimentConfig {
    let mut c = base(
        "sis-contour",
        Model::Sis,
        sis_schedule(0.12, 0.04),
        noiseless(0.1, 2500, vec![0.01]),
        vec![
            EstimatorConfig::new("gradient", EstimatorKind::Gradient, 1.0, 1.0).with_theta0(&[0.05, 0.07]),
            EstimatorConfig::new("gwrls", EstimatorKind::Gwrls, 0.98, 1e5).with_theta0(&[0.05, 0.07]),
        ],
    );
    c.metrics.pi_window = Some(2);
    c.metrics.rmse = Some(RmseConfig {
        beta: Grid {
            min: 0.0,
            max: 0.3,
            points: 61,
        },
        gamma: Grid {
            min: 0.0,
            max: 0.1,
            points: 41,
        },
    });
    c
}

fn sis_windup() -> ExperimentConfig {
    let mut sim = noiseless(0.1, 3001, vec![0.01]);
    sim.process_noise = ProcessNoiseKind::AdditiveSigma;
    sim.sigma = 0.01;
    base(
        "sis-windup",
        Model::Sis,
        sis_schedule(0.8076, 0.2692),
        sim,
        rls_pair(0.98, 1e5, Some(&[1.0, 1.0])),
    )
}

fn sir_network(name: &str, topology: Topology) -> ExperimentConfig {
    let n = 7;
    let mut x0 = vec![0.0; 2 * n];
    x0[..n].fill(0.01);
    base(
        name,
        Model::Sir { nodes: n },
        Truth::Network(NetworkConfig {
            topology,
            n,
            edge_prob: 0.5,
            weight_range: (0.05, 0.5),
            gamma_range: (0.1, 0.4),
        }),
        SimConfig {
            h: 0.2,
            samples: 301,
            x0,
            process_noise: ProcessNoiseKind::StateScaled,
            sigma: 0.05,
            obs_rel_std: 0.0,
            target: TargetKind::Drift,
        },
        rls_pair(0.98, 1e5, None),
    )
}

fn two_node(scale: f64) -> ModelParams {
    let b = DMatrix::from_row_slice(2, 2, &[0.5, 0.08, 0.04, 0.35]) * scale;
    ModelParams::Sir(SirNetworkParams {
        b,
        gamma: DVector::from_vec(vec![0.1, 0.15]),
    })
}

/// Two-node SIR with a lockdown-style drop, a rebound and a small late change.
pub fn changepoint_schedule() -> ParamSchedule<ModelParams> {
    let scales = [1.0, 0.3, 0.8, 0.8 * 0.92];
    let starts = [0.0, CHANGEPOINT_SWITCHES[0], CHANGEPOINT_SWITCHES[1], CHANGEPOINT_SWITCHES[2]];
    ParamSchedule::new(
        starts
            .iter()
            .zip(scales)
            .map(|(&t_start, s)| Segment {
                t_start,
                params: two_node(s),
            })
            .collect(),
    )
    .expect("switch times are increasing")
}

fn sir_changepoint() -> ExperimentConfig {
    let det = DetectorConfig::new(0.3, 1e-3);
    let mut estimators = rls_pair(0.98, 1e5, None);
    estimators.push(EstimatorConfig::new("cp-gwrls", EstimatorKind::Gwrls, 0.98, 1e5).with_detector(det));
    estimators.push(EstimatorConfig::new("cp-efrls", EstimatorKind::Efrls, 0.98, 1e5).with_detector(det));
    base(
        "sir-changepoint",
        Model::Sir { nodes: 2 },
        Truth::Schedule {
            schedule: changepoint_schedule(),
        },
        SimConfig {
            h: 0.2,
            samples: 301,
            x0: vec![0.02, 0.001, 0.0, 0.0],
            process_noise: ProcessNoiseKind::StateScaled,
            sigma: 0.05,
            obs_rel_std: 0.1,
            target: TargetKind::Drift,
        },
        estimators,
    )
}

fn roc_sweep() -> ExperimentConfig {
    let mut c = sir_changepoint();
    c.name = "roc-sweep".into();
    c.output_dir = "out/roc-sweep".into();
    c.estimators.retain(|e| e.label == "cp-gwrls");
    c.metrics.roc = Some(RocConfig {
        estimator: "cp-gwrls".into(),
        window: crate::metrics::DEFAULT_ROC_WINDOW,
        etas: ROC_ETAS.to_vec(),
        taus: ROC_TAUS.to_vec(),
        trials: 100,
    });
    c
}

/// Scalar SIS whose infection rate halves mid-run.
fn sis_changepoint() -> ExperimentConfig {
    let schedule = ParamSchedule::new(vec![
        Segment {
            t_start: 0.0,
            params: ModelParams::Sis(SisParams {
                beta: 0.8076,
                gamma: 0.2692,
            }),
        },
        Segment {
            t_start: 50.0,
            params: ModelParams::Sis(SisParams {
                beta: 0.4,
                gamma: 0.2692,
            }),
        },
    ])
    .expect("switch times are increasing");
    let mut sim = noiseless(0.1, 1001, vec![0.01]);
    sim.process_noise = ProcessNoiseKind::AdditiveSigma;
    sim.sigma = 0.005;
    let det = DetectorConfig::new(0.3, 1e-3);
    let mut estimators = rls_pair(0.98, 1e5, Some(&[1.0, 1.0]));
    estimators.push(
        EstimatorConfig::new("cp-gwrls", EstimatorKind::Gwrls, 0.98, 1e5)
            .with_theta0(&[1.0, 1.0])
            .with_detector(det),
    );
    base("sis-changepoint", Model::Sis, Truth::Schedule { schedule }, sim, estimators)
}

/// Looks up a preset by name.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    Some(match name {
        "sis-basic" => sis_basic(),
        "sis-contour" => sis_contour(),
        "sis-windup" => sis_windup(),
        "sir-network-fc" => sir_network(name, Topology::FullyConnected),
        "sir-network-star" => sir_network(name, Topology::Star),
        "sir-network-er" => sir_network(name, Topology::ErdosRenyi),
        "sir-changepoint" => sir_changepoint(),
        "roc-sweep" => roc_sweep(),
        "sis-changepoint" => sis_changepoint(),
        _ => return None,
    })
}

/// Every preset, in listing order.
pub fn presets() -> Vec<ExperimentConfig> {
    PRESET_NAMES.iter().map(|n| preset(n).expect("listed preset exists")).collect()
}
