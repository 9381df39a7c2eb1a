//! Without persistent excitation the data only pin down the ratio β/γ.
//!
//! Gradient descent on noiseless SIS data drifts onto the line
//! γ̂ = (γ/β)·β̂ instead of reaching (β, γ), and the moving PI index with
//! window L = 2 shows why: it is small during the transient and blows up
//! once the epidemic settles at its equilibrium.
//!
//! ```text
//! cargo run --release --example excitation_loss
//! ```

use excite_id::epimodels::{Model, ModelParams, ParamSchedule, SisParams};
use excite_id::estimators::{GradientDescent, OnlineEstimator};
use excite_id::signal::moving_pi;
use excite_id::sim::{simulate, NoiseConfig};
use nalgebra::dvector;

fn main() -> excite_id::Result<()> {
    let (beta, gamma) = (0.12, 0.04);
    let schedule = ParamSchedule::constant(0.0, ModelParams::Sis(SisParams { beta, gamma }));
    let traj = simulate(Model::Sis, &schedule, &dvector![0.01], 0.1, 2500, &NoiseConfig::noiseless())?;

    let mut gd = GradientDescent::new(dvector![0.05, 0.07]);
    for d in &traj.data {
        gd.step(d)?;
    }
    let th = gd.theta();
    println!("true (β, γ)      = ({beta}, {gamma}), ratio {:.4}", beta / gamma);
    println!("gradient (β̂, γ̂)  = ({:.5}, {:.5}), ratio {:.4}", th[0], th[1], th[0] / th[1]);
    println!("distance to truth = {:.4}", (th - dvector![beta, gamma]).norm());
    println!("final I = {:.6} (equilibrium 1 − γ/β = {:.6})", traj.states.last().unwrap()[0], 1.0 - gamma / beta);

    let pi = moving_pi(&traj.data, 2)?;
    let best = pi.iter().min_by(|a, b| a.kappa.total_cmp(&b.kappa)).unwrap();
    println!("\nmoving PI index, L = 2");
    println!("  smallest κ = {:.3e} over samples {:?}", best.kappa, best.window);
    for r in pi.iter().step_by(400).chain(pi.last()) {
        println!("  window {:>11?}  κ = {:.3e}  λ_min = {:.3e}", r.window, r.kappa, r.lambda_min);
    }
    Ok(())
}
