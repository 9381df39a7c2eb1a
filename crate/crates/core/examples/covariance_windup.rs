//! Covariance windup: once a noisy SIS epidemic reaches equilibrium the
//! data stop exciting both parameters. Exponential forgetting keeps
//! discounting the old information and its covariance becomes
//! ill-conditioned, while the greedy excitation set keeps it bounded.
//!
//! ```text
//! cargo run --release --example covariance_windup
//! ```

use excite_id::epimodels::{Model, ModelParams, ParamSchedule, SisParams};
use excite_id::estimators::{EfRls, GwRls, OnlineEstimator};
use excite_id::signal::condition_number;
use excite_id::sim::{simulate, NoiseConfig};
use nalgebra::dvector;

fn main() -> excite_id::Result<()> {
    let schedule = ParamSchedule::constant(0.0, ModelParams::Sis(SisParams { beta: 0.8076, gamma: 0.2692 }));
    let traj = simulate(Model::Sis, &schedule, &dvector![0.01], 0.1, 3001, &NoiseConfig::additive(0.01, 7))?;

    let mut gw = GwRls::with_scaled_identity(dvector![1.0, 1.0], 1e5, 0.98)?;
    let mut ef = EfRls::with_scaled_identity(dvector![1.0, 1.0], 1e5, 0.98)?;
    let (mut min_gw, mut min_ef) = (f64::INFINITY, f64::INFINITY);
    println!("{:>6}  {:>12}  {:>12}", "t", "κ(P) GW-RLS", "κ(P) EF-RLS");
    for d in &traj.data {
        gw.step(d)?;
        ef.step(d)?;
        let k_gw = condition_number(gw.covariance().unwrap())?;
        let k_ef = condition_number(ef.covariance().unwrap())?;
        min_gw = min_gw.min(k_gw);
        min_ef = min_ef.min(k_ef);
        if d.k % 250 == 0 || d.k + 1 == traj.data.len() {
            println!("{:>6.1}  {:>12.3e}  {:>12.3e}", d.t, k_gw, k_ef);
        }
    }
    println!("\nminimum κ(P): GW-RLS {min_gw:.3e}, EF-RLS {min_ef:.3e}");
    println!("final estimates: GW-RLS {:.4?}, EF-RLS {:.4?}", gw.theta().as_slice(), ef.theta().as_slice());
    Ok(())
}
