//! Deployment configurations and solver results.

use crate::graph::{EdgeWeights, ExtendedGraph};
use crate::scenario::{Scenario, ScenarioError, Tier};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    FinExact,
    FinGreedy,
    Mcp,
    Opt,
    #[value(skip)]
    Manual,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::FinExact => "fin-exact",
            Algorithm::FinGreedy => "fin-greedy",
            Algorithm::Mcp => "mcp",
            Algorithm::Opt => "opt",
            Algorithm::Manual => "manual",
        }
    }

    pub fn uses_gamma(self) -> bool {
        matches!(self, Algorithm::FinExact | Algorithm::FinGreedy)
    }

    pub fn uses_lambda(self) -> bool {
        self == Algorithm::FinGreedy
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Placement {
    pub block: usize,
    pub node: String,
}

/// Blocks `1..=k` mapped to nodes, terminating at the exit of block `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub app: String,
    pub placements: Vec<Placement>,
    /// index of the terminating exit (1-based over the model's exits)
    pub exit: usize,
    pub algorithm: Algorithm,
}

impl Configuration {
    /// Builds a configuration from a node per block, starting at block 1.
    pub fn from_nodes<S: AsRef<str>>(app: &str, nodes: &[S], exit: usize, algorithm: Algorithm) -> Self {
        Configuration {
            app: app.to_string(),
            placements: nodes
                .iter()
                .enumerate()
                .map(|(i, n)| Placement {
                    block: i + 1,
                    node: n.as_ref().to_string(),
                })
                .collect(),
            exit,
            algorithm,
        }
    }

    /// Maps an extended-graph path (source vertex first) to a configuration.
    pub(crate) fn from_graph_path(graph: &ExtendedGraph, path: &[usize], algorithm: Algorithm) -> Self {
        let placements: Vec<Placement> = path
            .iter()
            .skip(1)
            .map(|&v| Placement {
                block: graph.vertices[v].block,
                node: graph.vertices[v].node.clone(),
            })
            .collect();
        let last = *path.last().expect("non-empty path");
        let exit = graph.exit_at(last).map_or(0, |e| e.index);
        Configuration {
            app: graph.app.clone(),
            placements,
            exit,
            algorithm,
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.placements.len()
    }

    pub fn nodes(&self) -> Vec<&str> {
        self.placements.iter().map(|p| p.node.as_str()).collect()
    }

    /// Number of deployed blocks per tier.
    pub fn blocks_per_tier(&self, s: &Scenario) -> Result<BTreeMap<Tier, usize>, ScenarioError> {
        let mut hist = BTreeMap::new();
        for p in &self.placements {
            *hist.entry(s.node(&p.node)?.tier).or_insert(0) += 1;
        }
        Ok(hist)
    }

    /// `[mobile, edge, cloud]` block counts.
    pub fn split(&self, s: &Scenario) -> Result<[usize; 3], ScenarioError> {
        let hist = self.blocks_per_tier(s)?;
        Ok([
            hist.get(&Tier::Mobile).copied().unwrap_or(0),
            hist.get(&Tier::Edge).copied().unwrap_or(0),
            hist.get(&Tier::Cloud).copied().unwrap_or(0),
        ])
    }
}

/// A configuration with its objective value (joules per second of stream).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub configuration: Configuration,
    pub energy: f64,
}

/// Canonical accumulation of the objective along a path.
///
/// Per-inference communication and compute energies are summed separately,
/// each weighted by the traversal fraction, then scaled by the inference rate.
/// The evaluation module follows the same order so both agree bit for bit.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct EnergyAccumulator {
    pub comm: f64,
    pub compute: f64,
}

impl EnergyAccumulator {
    pub fn add(&mut self, tau: f64, comm: f64, compute: f64) {
        self.comm += tau * comm;
        self.compute += tau * compute;
    }

    pub fn add_weights(&mut self, w: &EdgeWeights) {
        self.add(w.traversal_fraction, w.comm_energy, w.compute_energy);
    }

    /// `(comm, compute, total)` per second at `rate` inferences per second.
    pub fn per_second(&self, rate: f64) -> (f64, f64, f64) {
        let comm = rate * self.comm;
        let compute = rate * self.compute;
        (comm, compute, comm + compute)
    }
}

/// Deterministic order between candidate paths of equal energy:
/// fewer blocks first, then the lexicographically smaller node-id sequence.
pub(crate) fn tie_break(a: &[&str], b: &[&str]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}
