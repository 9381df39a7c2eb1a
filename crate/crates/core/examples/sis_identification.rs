//! Identify (β, γ) of a scalar SIS epidemic from noiseless data with the
//! greedy estimator and the exponential-forgetting baseline.
//!
//! ```text
//! cargo run --release --example sis_identification
//! ```

use excite_id::epimodels::{Model, ModelParams, ParamSchedule, SisParams};
use excite_id::estimators::{EfRls, GwRls, OnlineEstimator};
use excite_id::metrics::{relative_error, DEFAULT_DELTA};
use excite_id::sim::{simulate, NoiseConfig};
use nalgebra::{dvector, DVector};

fn main() -> excite_id::Result<()> {
    let truth = SisParams { beta: 0.8076, gamma: 0.2692 };
    let schedule = ParamSchedule::constant(0.0, ModelParams::Sis(truth));
    let traj = simulate(Model::Sis, &schedule, &dvector![0.01], 0.1, 1001, &NoiseConfig::noiseless())?;

    let theta0: DVector<f64> = dvector![1.0, 1.0];
    let mut gw = GwRls::with_scaled_identity(theta0.clone(), 1e5, 0.98)?;
    let mut ef = EfRls::with_scaled_identity(theta0, 1e5, 0.98)?;
    let theta = ModelParams::Sis(truth).theta();

    println!("{:>6}  {:>10}  {:>22}  {:>22}", "t", "I", "GW-RLS max rel err", "EF-RLS max rel err");
    for (d, x) in traj.data.iter().zip(&traj.states) {
        gw.step(d)?;
        ef.step(d)?;
        if d.k % 100 == 0 || d.k + 1 == traj.data.len() {
            let e_gw = relative_error(&theta, gw.theta(), DEFAULT_DELTA)?.max();
            let e_ef = relative_error(&theta, ef.theta(), DEFAULT_DELTA)?.max();
            println!("{:>6.1}  {:>10.6}  {:>22.3e}  {:>22.3e}", d.t, x[0], e_gw, e_ef);
        }
    }
    println!(
        "\nGW-RLS estimate (β, γ) = ({:.6}, {:.6}); excitation set holds {} samples",
        gw.theta()[0],
        gw.theta()[1],
        gw.accepted_indices().len()
    );
    Ok(())
}
