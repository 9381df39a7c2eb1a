//! Run a named experiment preset end to end and write its artifacts.
//!
//! ```text
//! cargo run --release --example presets -- sir-changepoint out/sir-changepoint
//! ```
//!
//! With no arguments the available presets are listed.

use excite_id::experiment::{preset, run, PRESET_NAMES};

fn main() -> excite_id::Result<()> {
    let mut args = std::env::args().skip(1);
    let Some(name) = args.next() else {
        println!("presets: {}", PRESET_NAMES.join(", "));
        return Ok(());
    };
    let mut config = preset(&name).ok_or_else(|| excite_id::Error::Validation(vec![format!("unknown preset {name}")]))?;
    if let Some(dir) = args.next() {
        config.output_dir = dir;
    }
    let summary = run(&config)?;
    println!("{} (seed {}), {} samples, change points {:?}", summary.name, summary.seed, summary.samples, summary.change_points);
    for e in &summary.estimators {
        println!(
            "  {:<10} final median rel. error {:.3e}, final κ(P) {}, detections {}",
            e.label,
            e.final_median_error,
            e.final_kappa_p.map_or("-".into(), |k| format!("{k:.3e}")),
            e.detections.len()
        );
    }
    for r in &summary.roc {
        println!("  ROC η = {}: AUC {:.4}", r.eta, r.auc);
    }
    println!("artifacts in {}", config.output_dir);
    Ok(())
}
