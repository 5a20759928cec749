//! Single-plane extended graph of one application.
//!
//! Vertices pair a network node with a DNN block, `(n, i)`; the application's
//! data source contributes one extra vertex `(source, 0)` bound to no block.
//! An edge `(n, i) -> (n', i + 1)` means: the tensor produced by block `i` on
//! `n` is shipped to `n'`, which then runs block `i + 1` (backbone and exit).
//! Each edge carries transfer time `T = d / b`, compute time `C = o / c` and
//! the energy `E` spent by the sender, receiver and the computing node.

use crate::config::EnergyAccumulator;
use crate::scenario::{Application, NetworkNode, Scenario, ScenarioError, Tier};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// How per-edge energy is weighted in the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TraversalMode {
    /// weight by the fraction of samples that actually traverse the edge
    #[default]
    Survival,
    /// weight the edge leaving block `i` by the exit fraction of block `i`
    Literal,
}

impl TraversalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TraversalMode::Survival => "survival",
            TraversalMode::Literal => "literal",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("source `{source_node}` of application `{app}` reaches no compute node")]
    NoSourceEdges { app: String, source_node: String },
}

/// Energy split of one edge: transmission/reception and computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeEnergy {
    pub comm: f64,
    pub compute: f64,
}

impl EdgeEnergy {
    pub fn total(&self) -> f64 {
        self.comm + self.compute
    }
}

/// Energy of moving `bits` from `sender` to `receiver` and running `ops` on the receiver.
///
/// Transfers are charged per bit (sender pays its transmit energy, receiver
/// its receive energy) and vanish when both ends are the same node or the
/// sender is a data source co-located with the receiver. Compute is charged
/// per operation at `compute_power / compute_capacity`.
pub fn edge_energy_split(bits: f64, ops: f64, sender: &NetworkNode, receiver: &NetworkNode) -> EdgeEnergy {
    let comm = if sender.id == receiver.id || sender.tier == Tier::Source {
        0.0
    } else {
        (sender.tx_energy_per_bit + receiver.rx_energy_per_bit) * bits
    };
    EdgeEnergy {
        comm,
        compute: receiver.energy_per_op() * ops,
    }
}

pub fn edge_energy(bits: f64, ops: f64, sender: &NetworkNode, receiver: &NetworkNode) -> f64 {
    edge_energy_split(bits, ops, sender, receiver).total()
}

/// Transfer time of `bits` over `bandwidth`; free on infinite links.
pub fn transfer_time(bits: f64, bandwidth: f64) -> f64 {
    if bandwidth.is_infinite() || bits == 0.0 {
        0.0
    } else {
        bits / bandwidth
    }
}

/// Compute time of `ops` on `capacity` ops/s.
pub fn compute_time(ops: f64, capacity: f64) -> f64 {
    if ops == 0.0 {
        0.0
    } else {
        ops / capacity
    }
}

/// Objective weight of the edge entering block `to_block` (`to_block - 1` is the tail).
pub fn traversal_fraction(app: &Application, to_block: usize, mode: TraversalMode) -> Result<f64, ScenarioError> {
    let tail = to_block - 1;
    match mode {
        TraversalMode::Survival => app.survival_fraction(tail),
        TraversalMode::Literal if tail == 0 => Ok(1.0),
        TraversalMode::Literal => app.exit_fraction(tail),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Vertex {
    pub node: String,
    /// 0 only for the data-source vertex
    pub block: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeWeights {
    pub transfer_time: f64,
    pub compute_time: f64,
    pub energy: f64,
    pub comm_energy: f64,
    pub compute_energy: f64,
    pub data_bits: f64,
    pub ops: f64,
    pub traversal_fraction: f64,
    /// b^h of the hop; may be infinite
    #[serde(serialize_with = "crate::units::serialize_f64")]
    pub bandwidth: f64,
    /// c^h of the head node
    pub compute: f64,
}

impl EdgeWeights {
    pub fn latency(&self) -> f64 {
        self.transfer_time + self.compute_time
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub weights: EdgeWeights,
}

/// Exit metadata of a block, copied from the application.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExitInfo {
    pub index: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendedGraph {
    pub app: String,
    pub mode: TraversalMode,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<GraphEdge>,
    /// outgoing edge indices per vertex
    pub adjacency: Vec<Vec<usize>>,
    pub source: usize,
    /// exits indexed by block (entry 0 is the source and never has one)
    pub exits: Vec<Option<ExitInfo>>,
    /// vertices whose exit meets the application's target accuracy
    pub terminal_vertices: Vec<usize>,
    pub inference_rate: f64,
    pub target_accuracy: f64,
    pub target_latency: f64,
}

impl ExtendedGraph {
    pub fn num_blocks(&self) -> usize {
        self.exits.len() - 1
    }

    pub fn vertex_index(&self, node: &str, block: usize) -> Option<usize> {
        self.vertices
            .iter()
            .position(|v| v.block == block && v.node == node)
    }

    pub fn exit_at(&self, vertex: usize) -> Option<ExitInfo> {
        self.exits[self.vertices[vertex].block]
    }

    /// Vertices whose block carries an exit with accuracy at least `alpha`.
    pub fn terminals_for(&self, alpha: f64) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.exit_at(v).is_some_and(|e| e.accuracy >= alpha))
            .collect()
    }

    pub fn edge_between(&self, from: usize, to: usize) -> Option<&GraphEdge> {
        self.adjacency[from]
            .iter()
            .map(|&e| &self.edges[e])
            .find(|e| e.to == to)
    }

    /// Objective `(comm, compute, total)` of a vertex path starting at the source.
    pub fn path_energy(&self, path: &[usize]) -> (f64, f64, f64) {
        let mut acc = EnergyAccumulator::default();
        for pair in path.windows(2) {
            let edge = self
                .edge_between(pair[0], pair[1])
                .expect("path follows graph edges");
            acc.add_weights(&edge.weights);
        }
        acc.per_second(self.inference_rate)
    }

    /// Σ (T + C) along a vertex path.
    pub fn path_latency(&self, path: &[usize]) -> f64 {
        path.windows(2)
            .map(|pair| {
                self.edge_between(pair[0], pair[1])
                    .expect("path follows graph edges")
                    .weights
                    .latency()
            })
            .sum()
    }

    pub fn to_dot(&self) -> String {
        let mut dot = DotWriter::new(&format!("extended_{}", self.app));
        for (i, v) in self.vertices.iter().enumerate() {
            let terminal = self.terminal_vertices.contains(&i);
            dot.vertex(i, &vertex_label(v, None), terminal);
        }
        for e in &self.edges {
            dot.edge(e.from, e.to, &weights_label(&e.weights));
        }
        dot.finish()
    }

    pub fn export_dot(&self, path: impl AsRef<Path>) -> io::Result<()> {
        std::fs::write(path, self.to_dot())
    }
}

pub(crate) fn vertex_label(v: &Vertex, depth: Option<usize>) -> String {
    let base = if v.block == 0 {
        format!("{}\\nsource", v.node)
    } else {
        format!("{}\\nblock {}", v.node, v.block)
    };
    match depth {
        Some(g) => format!("{base}\\ng={g}"),
        None => base,
    }
}

pub(crate) fn weights_label(w: &EdgeWeights) -> String {
    format!("{:.3e}|{:.3e}|{:.3e}", w.transfer_time, w.compute_time, w.energy)
}

/// Minimal Graphviz writer shared by the graph exporters.
pub(crate) struct DotWriter {
    out: String,
}

impl DotWriter {
    pub(crate) fn new(name: &str) -> Self {
        let mut out = String::new();
        let safe: String = name
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        writeln!(out, "digraph {safe} {{").unwrap();
        writeln!(out, "  rankdir=LR;").unwrap();
        writeln!(out, "  node [shape=box, fontname=\"Helvetica\"];").unwrap();
        DotWriter { out }
    }

    pub(crate) fn vertex(&mut self, id: usize, label: &str, terminal: bool) {
        let style = if terminal { ", peripheries=2" } else { "" };
        writeln!(self.out, "  v{id} [label=\"{label}\"{style}];").unwrap();
    }

    pub(crate) fn edge(&mut self, from: usize, to: usize, label: &str) {
        writeln!(self.out, "  v{from} -> v{to} [label=\"{label}\"];").unwrap();
    }

    pub(crate) fn finish(mut self) -> String {
        self.out.push_str("}\n");
        self.out
    }
}

/// Builds the extended graph of application `app_id`.
pub fn build_extended_graph(s: &Scenario, app_id: &str, mode: TraversalMode) -> Result<ExtendedGraph, GraphError> {
    let app = s.application(app_id)?;
    let source_node = s.node(&app.source_node)?;

    let mut vertices = vec![Vertex {
        node: source_node.id.clone(),
        block: 0,
    }];
    let hosts: Vec<&NetworkNode> = s
        .nodes
        .iter()
        .filter(|n| s.effective_compute(app_id, &n.id).is_ok_and(|c| c > 0.0))
        .collect();
    // layer[i] lists the vertex indices of block i
    let mut layers: Vec<Vec<usize>> = vec![vec![0]];
    for block in 1..=app.num_blocks() {
        let mut layer = Vec::with_capacity(hosts.len());
        for host in &hosts {
            layer.push(vertices.len());
            vertices.push(Vertex {
                node: host.id.clone(),
                block,
            });
        }
        layers.push(layer);
    }

    let mut edges = Vec::new();
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for block in 1..=app.num_blocks() {
        let bits = app.output_bits(block - 1)?;
        let ops = app.block(block)?.total_ops();
        let tau = traversal_fraction(app, block, mode)?;
        for &from in &layers[block - 1] {
            let sender = s.node(&vertices[from].node)?;
            for &to in &layers[block] {
                let receiver = s.node(&vertices[to].node)?;
                let bandwidth = s.effective_bandwidth(app_id, &sender.id, &receiver.id)?;
                if bandwidth <= 0.0 {
                    continue;
                }
                let compute = s.effective_compute(app_id, &receiver.id)?;
                let energy = edge_energy_split(bits, ops, sender, receiver);
                let weights = EdgeWeights {
                    transfer_time: transfer_time(bits, bandwidth),
                    compute_time: compute_time(ops, compute),
                    energy: energy.total(),
                    comm_energy: energy.comm,
                    compute_energy: energy.compute,
                    data_bits: bits,
                    ops,
                    traversal_fraction: tau,
                    bandwidth,
                    compute,
                };
                adjacency[from].push(edges.len());
                edges.push(GraphEdge { from, to, weights });
            }
        }
    }
    if adjacency[0].is_empty() && app.num_blocks() > 0 {
        return Err(GraphError::NoSourceEdges {
            app: app_id.to_string(),
            source_node: source_node.id.clone(),
        });
    }

    let mut exits = vec![None];
    exits.extend(app.model.blocks.iter().map(|b| {
        b.exit.as_ref().map(|e| ExitInfo {
            index: e.index,
            accuracy: e.accuracy,
        })
    }));
    let mut graph = ExtendedGraph {
        app: app_id.to_string(),
        mode,
        vertices,
        edges,
        adjacency,
        source: 0,
        exits,
        terminal_vertices: Vec::new(),
        inference_rate: app.inference_rate,
        target_accuracy: app.target_accuracy,
        target_latency: app.target_latency,
    };
    graph.terminal_vertices = graph.terminals_for(app.target_accuracy);
    Ok(graph)
}
