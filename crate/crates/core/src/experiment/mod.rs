//! Config-driven experiment runner.
//!
//! An [`ExperimentConfig`] names a model, its ground-truth parameters, a
//! simulation setup, the estimators to run and the metrics to report.
//! [`run`] simulates the stream once, feeds it to every estimator and
//! writes CSV artifacts, a JSON summary and a manifest with SHA-256 digests.

mod config;
mod presets;
mod run;

pub use config::*;
pub use presets::*;
pub use run::*;
