//! The recursive greedy estimator equals the closed-form minimizer of its
//! weighted least-squares cost, evaluated on the excitation set it chose.
//!
//! ```text
//! cargo run --release --example batch_oracle
//! ```

use std::collections::BTreeSet;

use excite_id::estimators::{batch_weighted_solve, GwRls, OnlineEstimator, WeightedCostSpec};
use excite_id::signal::Datum;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> excite_id::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (p, alpha, rho) = (3, 0.98, 1e3);
    let truth = DVector::from_fn(p, |_, _| rng.random_range(-1.0..1.0));
    let data = (0..30)
        .map(|k| {
            let phi = DMatrix::from_fn(1, p, |_, _| rng.random_range(-1.0..1.0));
            let psi = &phi * &truth + DVector::from_element(1, 0.01 * rng.random_range(-1.0..1.0));
            Datum::new(k, k as f64, phi, psi)
        })
        .collect::<excite_id::Result<Vec<_>>>()?;

    let theta0 = DVector::zeros(p);
    let mut gw = GwRls::with_scaled_identity(theta0.clone(), rho, alpha)?;
    println!("{:>3}  {:>8}  {:>12}", "k", "accepted", "rel. gap");
    for (k, d) in data.iter().enumerate() {
        let accepted = gw.step(d)?.is_accepted();
        let spec = WeightedCostSpec {
            data: data[..=k].to_vec(),
            excitation: gw.accepted_indices().iter().copied().collect::<BTreeSet<_>>(),
            alpha,
            theta0: theta0.clone(),
            p0: DMatrix::identity(p, p) * rho,
        };
        let batch = batch_weighted_solve(&spec, k + 1)?;
        let gap = (gw.theta() - &batch).norm() / batch.norm().max(1e-300);
        println!("{k:>3}  {accepted:>8}  {gap:>12.3e}");
    }
    println!("\nexcitation set: {:?}", gw.accepted_indices());
    Ok(())
}
