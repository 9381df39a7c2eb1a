//! Receiver operating characteristic of the change-point detector on the
//! two-node SIR scenario, for several EWMA weights η.
//!
//! ```text
//! cargo run --release --example roc_sweep -- [trials]
//! ```

use excite_id::changepoint::{LrtConfig, ResettingEstimator};
use excite_id::epimodels::Model;
use excite_id::estimators::GwRls;
use excite_id::experiment::{changepoint_schedule, change_point_indices, ROC_ETAS, ROC_TAUS};
use excite_id::metrics::{roc_points, DetectionRun, DEFAULT_ROC_WINDOW};
use excite_id::sim::{simulate, NoiseConfig, TargetKind};
use nalgebra::{dvector, DVector};

fn main() -> excite_id::Result<()> {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(30);
    let schedule = changepoint_schedule();
    let x0 = dvector![0.02, 0.001, 0.0, 0.0];
    let streams = (0..trials)
        .map(|seed| {
            let noise = NoiseConfig {
                target: TargetKind::Drift,
                ..NoiseConfig::state_scaled(0.05, 0.1, 1000 + seed)
            };
            simulate(Model::Sir { nodes: 2 }, &schedule, &x0, 0.2, 301, &noise).map(|t| t.data)
        })
        .collect::<excite_id::Result<Vec<_>>>()?;
    let cps = change_point_indices(&schedule, 0.2, streams[0].len());
    println!("{trials} trials, true change points at samples {cps:?}");

    for eta in ROC_ETAS {
        let curve = roc_points(&cps, DEFAULT_ROC_WINDOW, eta, &ROC_TAUS, |tau| {
            streams
                .iter()
                .map(|data| {
                    let gw = GwRls::with_scaled_identity(DVector::zeros(6), 1e5, 0.98)?;
                    let mut tracker = ResettingEstimator::new(gw, LrtConfig::new(eta, tau))?;
                    let mut detections = Vec::new();
                    for d in data {
                        if tracker.step(d)?.detected {
                            detections.push(d.k);
                        }
                    }
                    Ok(DetectionRun { detections, samples: data.len() })
                })
                .collect()
        })?;
        println!("\nη = {eta}: AUC {:.4}", curve.auc());
        for pt in &curve.points {
            println!("  τ = {:<7}  TPR {:.3}  FP rate {:.4}", pt.tau, pt.counts.tpr(), pt.counts.fp_rate());
        }
    }
    Ok(())
}
