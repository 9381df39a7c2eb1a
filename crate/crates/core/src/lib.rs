//! Online parameter identification when the data are only weakly exciting.
//!
//! The crate streams regressor/target pairs `(φ_k, ψ_k)` through recursive
//! estimators and reports how well the parameters are pinned down:
//!
//! - [`signal`]: data points, information matrices, condition numbers and the
//!   moving practical-identifiability index.
//! - [`estimators`]: greedily-weighted RLS, exponential-forgetting RLS,
//!   gradient descent and the closed-form weighted least-squares oracle.
//! - [`changepoint`]: model predictability, EWMA smoothing, the recursive
//!   likelihood-ratio detector and the resetting estimator wrapper.
//! - [`epimodels`] and [`sim`]: SIS and networked SIR models, piecewise
//!   constant schedules and a seeded Euler–Maruyama simulator.
//! - [`metrics`]: relative errors, RMSE surfaces and ROC evaluation.
//! - [`experiment`]: JSON-configured runs, named presets and CSV artifacts.
//!
//! The `examples/` directory has one runnable program per capability:
//!
//! ```text
//! cargo run --release --example sis_identification
//! cargo run --release --example excitation_loss
//! cargo run --release --example covariance_windup
//! cargo run --release --example network_sir -- star
//! cargo run --release --example changepoint_tracking
//! cargo run --release --example roc_sweep -- 50
//! cargo run --release --example rmse_contour -- surface.csv
//! cargo run --release --example batch_oracle
//! cargo run --release --example presets -- sir-changepoint out/cp
//! ```
//!
//! A minimal run:
//!
//! ```
//! use excite_id::epimodels::{Model, ModelParams, ParamSchedule, SisParams};
//! use excite_id::estimators::{GwRls, OnlineEstimator};
//! use excite_id::sim::{simulate, NoiseConfig};
//! use nalgebra::dvector;
//!
//! let truth = ModelParams::Sis(SisParams { beta: 0.8076, gamma: 0.2692 });
//! let traj = simulate(
//!     Model::Sis,
//!     &ParamSchedule::constant(0.0, truth),
//!     &dvector![0.01],
//!     0.1,
//!     1001,
//!     &NoiseConfig::noiseless(),
//! )?;
//! let mut est = GwRls::with_scaled_identity(dvector![1.0, 1.0], 1e5, 0.98)?;
//! for d in &traj.data {
//!     est.step(d)?;
//! }
//! assert!((est.theta()[0] - 0.8076).abs() < 1e-6);
//! # Ok::<(), excite_id::Error>(())
//! ```

pub mod changepoint;
pub mod csvio;
pub mod epimodels;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod metrics;
pub mod rng;
pub mod signal;
pub mod sim;

pub use error::{Error, Result};
