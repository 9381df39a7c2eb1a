//! Ground-truth epidemic models, their linear-in-parameters regressors,
//! contact networks and piecewise-constant parameter schedules.
//!
//! States are stacked as `[I]` for the scalar SIS model and
//! `[I₁..Iₙ, R₁..Rₙ]` for the networked SIR model; parameter vectors are
//! `[β, γ]` and `[vec(B), γ]` with `vec` stacking columns.

mod network;
mod schedule;
mod sir;
mod sis;

pub use network::{make_network, NetworkSpec, Topology};
pub use schedule::{ParamSchedule, Segment};
pub use sir::{local_r0, sir_drift, sir_regressor, SirNetworkParams};
pub use sis::{sis_drift, sis_regressor, SisParams};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Model structure, independent of parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Model {
    Sis,
    Sir { nodes: usize },
}

/// Parameter values for one of the models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelParams {
    Sis(SisParams),
    Sir(SirNetworkParams),
}

impl ModelParams {
    pub fn model(&self) -> Model {
        match self {
            ModelParams::Sis(_) => Model::Sis,
            ModelParams::Sir(p) => Model::Sir { nodes: p.nodes() },
        }
    }

    /// Stacked parameter vector `θ`.
    pub fn theta(&self) -> DVector<f64> {
        match self {
            ModelParams::Sis(p) => p.theta(),
            ModelParams::Sir(p) => p.theta(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelParams::Sis(p) => p.validate(),
            ModelParams::Sir(p) => p.validate(),
        }
    }

    /// Reproduction numbers: `β/γ` for SIS, local values for SIR.
    pub fn r0(&self) -> Result<DVector<f64>> {
        match self {
            ModelParams::Sis(p) => {
                if p.gamma <= 0.0 {
                    return invalid("reproduction number needs a positive recovery rate");
                }
                Ok(DVector::from_element(1, p.beta / p.gamma))
            }
            ModelParams::Sir(p) => local_r0(p),
        }
    }
}

impl Model {
    pub fn state_dim(&self) -> usize {
        match *self {
            Model::Sis => 1,
            Model::Sir { nodes } => 2 * nodes,
        }
    }

    pub fn param_dim(&self) -> usize {
        match *self {
            Model::Sis => 2,
            Model::Sir { nodes } => nodes * nodes + nodes,
        }
    }

    /// Rebuilds model parameters from a stacked vector `θ`.
    pub fn params_from_theta(&self, theta: &DVector<f64>) -> Result<ModelParams> {
        if theta.len() != self.param_dim() {
            return invalid("parameter vector has the wrong length for this model");
        }
        Ok(match *self {
            Model::Sis => ModelParams::Sis(SisParams {
                beta: theta[0],
                gamma: theta[1],
            }),
            Model::Sir { nodes } => ModelParams::Sir(SirNetworkParams::from_theta_unchecked(nodes, theta)),
        })
    }

    pub fn validate_state(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.state_dim() {
            return invalid(format!(
                "state has length {}, model expects {}",
                x.len(),
                self.state_dim()
            ));
        }
        match *self {
            Model::Sis => sis::check_proportion(x[0]),
            Model::Sir { nodes } => sir::check_simplex(&x.rows(0, nodes).into(), &x.rows(nodes, nodes).into()),
        }
    }

    pub fn regressor(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.validate_state(x)?;
        match *self {
            Model::Sis => sis_regressor(x[0]),
            Model::Sir { nodes } => sir_regressor(&x.rows(0, nodes).into(), &x.rows(nodes, nodes).into()),
        }
    }

    pub fn drift(&self, x: &DVector<f64>, params: &ModelParams) -> Result<DVector<f64>> {
        self.validate_state(x)?;
        match (*self, params) {
            (Model::Sis, ModelParams::Sis(p)) => Ok(DVector::from_element(1, sis_drift(x[0], p)?)),
            (Model::Sir { nodes }, ModelParams::Sir(p)) if p.nodes() == nodes => {
                sir_drift(&x.rows(0, nodes).into(), &x.rows(nodes, nodes).into(), p)
            }
            _ => invalid("parameters do not belong to this model"),
        }
    }

    /// Projects a state back onto the valid set. Returns true when anything moved.
    ///
    /// Components are clipped to `[0, 1]`; for SIR, a node with `I + R > 1` has
    /// both shares scaled down by `I + R`.
    pub fn clamp(&self, x: &mut DVector<f64>) -> bool {
        let mut moved = false;
        for v in x.iter_mut() {
            let c = v.clamp(0.0, 1.0);
            if c != *v {
                *v = c;
                moved = true;
            }
        }
        if let Model::Sir { nodes } = *self {
            for i in 0..nodes {
                let total = x[i] + x[nodes + i];
                if total > 1.0 {
                    x[i] /= total;
                    x[nodes + i] /= total;
                    moved = true;
                }
            }
        }
        moved
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(Model::Sis.param_dim(), 2);
        assert_eq!(Model::Sir { nodes: 7 }.param_dim(), 56);
        assert_eq!(Model::Sir { nodes: 7 }.state_dim(), 14);
    }

    #[test]
    fn clamp_projects_onto_simplex() {
        let m = Model::Sir { nodes: 2 };
        let mut x = DVector::from_vec(vec![0.8, -0.1, 0.4, 0.2]);
        assert!(m.clamp(&mut x));
        assert!((x[0] + x[2] - 1.0).abs() < 1e-15);
        assert!((x[0] / x[2] - 2.0).abs() < 1e-12);
        assert_eq!(x[1], 0.0);
        m.validate_state(&x).unwrap();
        let mut ok = DVector::from_vec(vec![0.1, 0.2, 0.3, 0.4]);
        assert!(!m.clamp(&mut ok));
    }

    #[test]
    fn mismatched_params_rejected() {
        let sis = ModelParams::Sis(SisParams { beta: 0.1, gamma: 0.1 });
        assert!(Model::Sir { nodes: 1 }.drift(&DVector::zeros(2), &sis).is_err());
    }

    #[test]
    fn theta_round_trip() {
        let spec = NetworkSpec::new(Topology::ErdosRenyi, 4, 21);
        let params = ModelParams::Sir(make_network(&spec).unwrap());
        let back = params.model().params_from_theta(&params.theta()).unwrap();
        assert_eq!(back, params);
    }
}
