//! Prediction RMSE over a (β, γ) grid for noiseless SIS data.
//!
//! The valley of the surface is the line β/γ = const along which the
//! weakly exciting data cannot discriminate. The surface is written as CSV
//! for plotting.
//!
//! ```text
//! cargo run --release --example rmse_contour -- [out.csv]
//! ```

use excite_id::epimodels::{Model, ModelParams, ParamSchedule, SisParams};
use excite_id::metrics::{rmse_surface, write_rmse_surface_csv};
use excite_id::sim::{simulate, NoiseConfig};
use nalgebra::dvector;

fn main() -> excite_id::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "rmse_surface.csv".into());
    let schedule = ParamSchedule::constant(0.0, ModelParams::Sis(SisParams { beta: 0.12, gamma: 0.04 }));
    let traj = simulate(Model::Sis, &schedule, &dvector![0.01], 0.1, 2500, &NoiseConfig::noiseless())?;

    let betas: Vec<f64> = (0..=60).map(|i| 0.005 * i as f64).collect();
    let gammas: Vec<f64> = (0..=40).map(|i| 0.0025 * i as f64).collect();
    let surface = rmse_surface(&traj.data, &betas, &gammas)?;

    // For each β, the γ with the lowest RMSE traces the valley.
    println!("{:>6}  {:>8}  {:>10}", "β", "best γ", "RMSE");
    for (i, b) in betas.iter().enumerate().step_by(6) {
        let (j, rmse) = surface
            .row(i)
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        println!("{b:>6.3}  {:>8.4}  {rmse:>10.3e}", gammas[j]);
    }

    let mut file = std::fs::File::create(&out)?;
    write_rmse_surface_csv(&mut file, &betas, &gammas, &surface)?;
    println!("\nwrote {} grid points to {out}", betas.len() * gammas.len());
    Ok(())
}
