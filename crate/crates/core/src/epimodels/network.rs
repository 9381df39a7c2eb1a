use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SirNetworkParams;
use crate::error::{invalid, Result};
use crate::rng::{substream, Substream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    FullyConnected,
    /// Node 0 is the hub.
    Star,
    ErdosRenyi,
}

/// Random contact network with sampled infection and recovery rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub topology: Topology,
    pub n: usize,
    /// Directed edge inclusion probability (Erdős–Rényi only).
    #[serde(default = "default_edge_prob")]
    pub edge_prob: f64,
    /// Range of infection rates on present edges.
    #[serde(default = "default_weight_range")]
    pub weight_range: (f64, f64),
    #[serde(default = "default_gamma_range")]
    pub gamma_range: (f64, f64),
    pub seed: u64,
}

fn default_edge_prob() -> f64 {
    0.5
}

fn default_weight_range() -> (f64, f64) {
    (0.05, 0.5)
}

fn default_gamma_range() -> (f64, f64) {
    (0.1, 0.4)
}

impl NetworkSpec {
    pub fn new(topology: Topology, n: usize, seed: u64) -> Self {
        Self {
            topology,
            n,
            edge_prob: default_edge_prob(),
            weight_range: default_weight_range(),
            gamma_range: default_gamma_range(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.n == 0 {
            errs.push("network needs at least one node".to_string());
        }
        if !(0.0..=1.0).contains(&self.edge_prob) {
            errs.push(format!("edge_prob must lie in [0, 1], got {}", self.edge_prob));
        }
        for (name, (lo, hi)) in [("weight_range", self.weight_range), ("gamma_range", self.gamma_range)] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                errs.push(format!("{name} must satisfy 0 < lo <= hi, got ({lo}, {hi})"));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(crate::Error::Validation(errs))
        }
    }

    fn has_edge(&self, i: usize, j: usize, rng: &mut impl Rng) -> bool {
        match self.topology {
            Topology::FullyConnected => true,
            Topology::Star => i == 0 || j == 0,
            Topology::ErdosRenyi => rng.random_bool(self.edge_prob),
        }
    }
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Samples a network; deterministic for a given spec.
///
/// Off-diagonal entries are visited row by row; absent edges and the
/// diagonal are exactly zero.
pub fn make_network(spec: &NetworkSpec) -> Result<SirNetworkParams> {
    spec.validate()?;
    if spec.topology == Topology::ErdosRenyi && spec.edge_prob.is_nan() {
        return invalid("edge_prob is NaN");
    }
    let mut rng = substream(spec.seed, Substream::NetworkWeights);
    let n = spec.n;
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j && spec.has_edge(i, j, &mut rng) {
                b[(i, j)] = uniform(&mut rng, spec.weight_range);
            }
        }
    }
    let gamma = DVector::from_fn(n, |_, _| uniform(&mut rng, spec.gamma_range));
    SirNetworkParams::new(b, gamma)
}
