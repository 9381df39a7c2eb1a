//! Identify the infection matrix B and recovery rates γ of a 7-node SIR
//! network under state-scaled process noise, then compare local
//! reproduction numbers.
//!
//! ```text
//! cargo run --release --example network_sir -- [fully-connected|star|erdos-renyi]
//! ```

use excite_id::epimodels::{local_r0, make_network, Model, ModelParams, NetworkSpec, ParamSchedule, Topology};
use excite_id::estimators::{EfRls, GwRls, OnlineEstimator};
use excite_id::metrics::{median, r0_error, relative_error, DEFAULT_DELTA};
use excite_id::sim::{simulate, NoiseConfig, TargetKind};
use nalgebra::DVector;

fn main() -> excite_id::Result<()> {
    let topology = match std::env::args().nth(1).as_deref() {
        Some("star") => Topology::Star,
        Some("erdos-renyi") => Topology::ErdosRenyi,
        _ => Topology::FullyConnected,
    };
    let n = 7;
    let truth = make_network(&NetworkSpec::new(topology, n, 7))?;
    let model = Model::Sir { nodes: n };
    let schedule = ParamSchedule::constant(0.0, ModelParams::Sir(truth.clone()));
    let mut x0 = DVector::zeros(2 * n);
    x0.rows_mut(0, n).fill(0.01);
    let noise = NoiseConfig {
        target: TargetKind::Drift,
        ..NoiseConfig::state_scaled(0.05, 0.0, 7)
    };
    let traj = simulate(model, &schedule, &x0, 0.2, 301, &noise)?;
    println!("{topology:?} network, {} parameters, {} samples, {} clamp events", model.param_dim(), traj.data.len(), traj.clamp_events);

    let p = model.param_dim();
    let mut gw = GwRls::with_scaled_identity(DVector::zeros(p), 1e5, 0.98)?;
    let mut ef = EfRls::with_scaled_identity(DVector::zeros(p), 1e5, 0.98)?;
    for d in &traj.data {
        gw.step(d)?;
        ef.step(d)?;
    }

    let theta = truth.theta();
    println!("true local R0: {:.3?}", local_r0(&truth)?.as_slice());
    for (name, est) in [("GW-RLS", gw.theta()), ("EF-RLS", ef.theta())] {
        let err = relative_error(&theta, est, DEFAULT_DELTA)?;
        let ModelParams::Sir(fit) = model.params_from_theta(est)? else { unreachable!() };
        let r0 = r0_error(&truth, &fit, DEFAULT_DELTA)?;
        println!(
            "{name}: median rel. error vec(B) {:.3e}, γ {:.3e}, local R0 {:.3e}",
            median(&err.as_slice()[..n * n]),
            median(&err.as_slice()[n * n..]),
            median(r0.as_slice()),
        );
    }
    Ok(())
}
