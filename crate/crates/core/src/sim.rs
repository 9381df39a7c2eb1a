//! Trajectory generation and construction of the `(φ, ψ)` data stream.
//!
//! States follow the Euler–Maruyama recursion
//! `x_{k+1} = x_k + h·f(x_k, θ(t_k)) + ξ_k`, are projected back onto the
//! valid simplex after every step, and targets are the finite differences
//! `ψ_k = (x_{k+1} − x_k)/h` of the realized states, optionally perturbed by
//! multiplicative observation noise.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::csvio::{finish, fmt_f64, parse_f64, writer};
use crate::epimodels::{Model, ModelParams, ParamSchedule};
use crate::error::{invalid, Error, Result};
use crate::rng::{substream, Substream};
use crate::signal::Datum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessNoiseKind {
    None,
    /// `ξ = σ·√h·z`, `z ∼ 𝓝(0, I)`.
    AdditiveSigma,
    /// `ξ = σ·S·b`, `b ∼ 𝓝(0, h·I)`, with `S` the elementwise signed square
    /// root of `φ(x)·diag(θ)`. `σ = 1` is the unscaled Langevin form; smaller
    /// values play the role of `1/√N` for a population of size `N`.
    StateScaled,
}

/// How the regression target `ψ_k` is formed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    /// `(x_{k+1} − x_k)/h` of the realized states, process noise included.
    #[default]
    FiniteDifference,
    /// The exact drift `f(x_k, θ(t_k))`, as when state derivatives are measured directly.
    Drift,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub process_kind: ProcessNoiseKind,
    #[serde(default)]
    pub sigma: f64,
    /// Observation noise standard deviation as a fraction of `|ψ_{k,i}|`.
    #[serde(default)]
    pub obs_rel_std: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub target: TargetKind,
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        Self {
            process_kind: ProcessNoiseKind::None,
            sigma: 0.0,
            obs_rel_std: 0.0,
            seed: 0,
            target: TargetKind::FiniteDifference,
        }
    }

    pub fn additive(sigma: f64, seed: u64) -> Self {
        Self {
            process_kind: ProcessNoiseKind::AdditiveSigma,
            sigma,
            obs_rel_std: 0.0,
            seed,
            target: TargetKind::FiniteDifference,
        }
    }

    pub fn state_scaled(sigma: f64, obs_rel_std: f64, seed: u64) -> Self {
        Self {
            process_kind: ProcessNoiseKind::StateScaled,
            sigma,
            obs_rel_std,
            seed,
            target: TargetKind::FiniteDifference,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return invalid(format!("sigma must be finite and nonnegative, got {}", self.sigma));
        }
        if !(self.obs_rel_std.is_finite() && self.obs_rel_std >= 0.0) {
            return invalid(format!(
                "obs_rel_std must be finite and nonnegative, got {}",
                self.obs_rel_std
            ));
        }
        Ok(())
    }
}

/// Simulated states and the data stream derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub model: Model,
    pub h: f64,
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    /// One datum per transition; `data.len() == states.len() − 1`.
    pub data: Vec<Datum>,
    /// True parameter vector active at each datum's time.
    pub theta_true: Vec<DVector<f64>>,
    /// Process noise `ξ_k` applied on each transition.
    pub process_noise: Vec<DVector<f64>>,
    /// Observation noise added to each `ψ_k`.
    pub obs_noise: Vec<DVector<f64>>,
    /// Number of steps where the state had to be projected back.
    pub clamp_events: usize,
}

impl Trajectory {
    pub fn stream(&self) -> impl Iterator<Item = &Datum> {
        self.data.iter()
    }

    /// CSV with columns `k, t, x0.., psi0..`; the last row has empty `psi` fields.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let nx = self.model.state_dim();
        let mut out = writer(w);
        let mut header = vec!["k".to_string(), "t".to_string()];
        header.extend((0..nx).map(|i| format!("x{i}")));
        header.extend((0..nx).map(|i| format!("psi{i}")));
        out.write_record(&header)?;
        for (k, (t, x)) in self.times.iter().zip(&self.states).enumerate() {
            let mut row = vec![k.to_string(), fmt_f64(*t)];
            row.extend(x.iter().map(|&v| fmt_f64(v)));
            match self.data.get(k) {
                Some(d) => row.extend(d.psi.iter().map(|&v| fmt_f64(v))),
                None => row.extend(std::iter::repeat_n(String::new(), nx)),
            }
            out.write_record(&row)?;
        }
        finish(out)
    }
}

/// Columns read back from a trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub psi: Vec<DVector<f64>>,
}

impl TrajectoryTable {
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let width = rdr.headers()?.len();
        if width < 4 || width % 2 != 0 {
            return invalid("trajectory CSV must have k, t and paired state/psi columns");
        }
        let nx = (width - 2) / 2;
        let parse = |s: &str| parse_f64(s).ok_or_else(|| Error::InvalidArgument(format!("bad float {s:?}")));
        let mut table = TrajectoryTable {
            times: Vec::new(),
            states: Vec::new(),
            psi: Vec::new(),
        };
        for rec in rdr.records() {
            let rec = rec?;
            table.times.push(parse(&rec[1])?);
            let x: Result<Vec<f64>> = (0..nx).map(|i| parse(&rec[2 + i])).collect();
            table.states.push(DVector::from_vec(x?));
            if !rec[2 + nx].is_empty() {
                let p: Result<Vec<f64>> = (0..nx).map(|i| parse(&rec[2 + nx + i])).collect();
                table.psi.push(DVector::from_vec(p?));
            }
        }
        Ok(table)
    }
}

/// Elementwise `sign(m)·√|m|`.
pub fn signed_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.map(|v| v.signum() * v.abs().sqrt())
}

/// Integrates `model` under `schedule` for `samples` time points `t₀ + k·h`.
pub fn simulate(
    model: Model,
    schedule: &ParamSchedule<ModelParams>,
    x0: &DVector<f64>,
    h: f64,
    samples: usize,
    noise: &NoiseConfig,
) -> Result<Trajectory> {
    if !(h.is_finite() && h > 0.0) {
        return invalid(format!("step size must be positive, got {h}"));
    }
    if samples < 2 {
        return invalid("need at least two samples");
    }
    noise.validate()?;
    schedule.validate()?;
    model.validate_state(x0)?;
    for seg in schedule.segments() {
        seg.params.validate()?;
        if seg.params.model() != model {
            return invalid("schedule parameters do not match the model");
        }
    }

    let nx = model.state_dim();
    let mut process_rng = substream(noise.seed, Substream::ProcessNoise);
    let mut obs_rng = substream(noise.seed, Substream::ObservationNoise);
    let t0 = schedule.start();
    let sqrt_h = h.sqrt();

    let mut traj = Trajectory {
        model,
        h,
        times: Vec::with_capacity(samples),
        states: Vec::with_capacity(samples),
        data: Vec::with_capacity(samples - 1),
        theta_true: Vec::with_capacity(samples - 1),
        process_noise: Vec::with_capacity(samples - 1),
        obs_noise: Vec::with_capacity(samples - 1),
        clamp_events: 0,
    };
    let mut x = x0.clone();
    traj.times.push(t0);
    traj.states.push(x.clone());

    for k in 0..samples - 1 {
        let t = t0 + k as f64 * h;
        let params = schedule.at(t)?;
        let theta = params.theta();
        let phi = model.regressor(&x)?;
        let drift = model.drift(&x, params)?;

        let xi = match noise.process_kind {
            ProcessNoiseKind::None => DVector::zeros(nx),
            ProcessNoiseKind::AdditiveSigma => {
                let z = DVector::from_fn(nx, |_, _| process_rng.sample::<f64, _>(StandardNormal));
                z * (noise.sigma * sqrt_h)
            }
            ProcessNoiseKind::StateScaled => {
                let scaled = DMatrix::from_fn(phi.nrows(), phi.ncols(), |i, j| phi[(i, j)] * theta[j]);
                let b = DVector::from_fn(theta.len(), |_, _| {
                    sqrt_h * process_rng.sample::<f64, _>(StandardNormal)
                });
                signed_sqrt(&scaled) * b * noise.sigma
            }
        };

        let mut next = &x + &drift * h + &xi;
        if model.clamp(&mut next) {
            traj.clamp_events += 1;
        }

        let mut psi = match noise.target {
            TargetKind::FiniteDifference => (&next - &x) / h,
            TargetKind::Drift => drift,
        };
        let nu = if noise.obs_rel_std > 0.0 {
            DVector::from_fn(nx, |i, _| {
                noise.obs_rel_std * psi[i].abs() * obs_rng.sample::<f64, _>(StandardNormal)
            })
        } else {
            DVector::zeros(nx)
        };
        psi += &nu;

        traj.data.push(Datum::new(k, t, phi, psi)?);
        traj.theta_true.push(theta);
        traj.process_noise.push(xi);
        traj.obs_noise.push(nu);
        x = next;
        traj.times.push(t0 + (k + 1) as f64 * h);
        traj.states.push(x.clone());
    }
    Ok(traj)
}

/// The trajectory's data stream, in index order.
pub fn stream(traj: &Trajectory) -> Vec<Datum> {
    traj.data.clone()
}
