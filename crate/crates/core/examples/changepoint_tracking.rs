//! Track a two-node SIR epidemic through three parameter switches.
//!
//! A plain GW-RLS estimator is compared with the same estimator wrapped in
//! the likelihood-ratio resetting scheme; detections and the per-segment
//! median error of the infection matrix are printed.
//!
//! ```text
//! cargo run --release --example changepoint_tracking -- [seed]
//! ```

use excite_id::changepoint::{LrtConfig, ResettingEstimator};
use excite_id::epimodels::Model;
use excite_id::estimators::{GwRls, OnlineEstimator};
use excite_id::experiment::{changepoint_schedule, CHANGEPOINT_SWITCHES};
use excite_id::metrics::{median, relative_error, DEFAULT_DELTA};
use excite_id::sim::{simulate, NoiseConfig, TargetKind};
use nalgebra::{dvector, DVector};

fn main() -> excite_id::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let schedule = changepoint_schedule();
    let noise = NoiseConfig {
        target: TargetKind::Drift,
        ..NoiseConfig::state_scaled(0.05, 0.1, seed)
    };
    let traj = simulate(Model::Sir { nodes: 2 }, &schedule, &dvector![0.02, 0.001, 0.0, 0.0], 0.2, 301, &noise)?;

    let fresh = || GwRls::with_scaled_identity(DVector::zeros(6), 1e5, 0.98);
    let mut plain = fresh()?;
    let mut tracked = ResettingEstimator::new(fresh()?, LrtConfig::new(0.3, 1e-3))?;

    let bounds: Vec<f64> = std::iter::once(0.0).chain(CHANGEPOINT_SWITCHES).chain([f64::INFINITY]).collect();
    let mut sums = vec![[0.0; 2]; bounds.len() - 1];
    let mut counts = vec![0usize; bounds.len() - 1];
    let mut detections = Vec::new();
    for (d, truth) in traj.data.iter().zip(&traj.theta_true) {
        plain.step(d)?;
        let step = tracked.step(d)?;
        if step.detected {
            detections.push(d.t);
        }
        let seg = bounds.windows(2).position(|w| d.t >= w[0] && d.t < w[1]).unwrap();
        for (slot, theta) in [plain.theta(), tracked.inner().theta()].into_iter().enumerate() {
            let e = relative_error(truth, theta, DEFAULT_DELTA)?;
            sums[seg][slot] += median(&e.as_slice()[..4]);
        }
        counts[seg] += 1;
    }

    println!("switch times: {CHANGEPOINT_SWITCHES:?}");
    println!("detections at t = {detections:?}");
    println!("\n{:>14}  {:>12}  {:>14}", "segment", "GW-RLS", "GW-RLS + reset");
    for (i, w) in bounds.windows(2).enumerate() {
        let c = counts[i] as f64;
        println!("{:>5} .. {:<6}  {:>12.4}  {:>14.4}", w[0], w[1], sums[i][0] / c, sums[i][1] / c);
    }
    Ok(())
}
