//! Feasible inference graph and configuration selection.
//!
//! Every extended-graph vertex is replicated at depths `0..=γ`. An edge
//! `v → v'` of the extended graph becomes the replica edges
//! `(v, g) → (v', g + s)` with steepness `s = ⌈γ (T + C) / δ⌉`, kept only when
//! `g + s ≤ γ`. Depth therefore tracks accumulated latency in units of `δ/γ`,
//! rounded up, and any path reaching a terminal replica meets the latency
//! target by construction. Edges exceeding the application's bandwidth or
//! compute share are dropped, and exits below the target accuracy are not
//! terminals. Replicas that lie on no source-to-terminal path are trimmed.

use crate::config::{tie_break, Algorithm, Configuration, Solution};
use crate::graph::{vertex_label, weights_label, DotWriter, ExtendedGraph};
use crate::scenario::Application;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::io;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("gamma must be at least 1")]
    InvalidGamma,
    #[error("lambda must lie in 1..={gamma}, got {lambda}")]
    InvalidLambda { lambda: usize, gamma: usize },
    #[error("replicas {0} and {1} are not joined by an edge")]
    Disconnected(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReplicaVertex {
    /// index into the extended graph's vertices
    pub base: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleEdge {
    pub from: usize,
    pub to: usize,
    /// index into the extended graph's edges
    pub base_edge: usize,
    pub steepness: usize,
    /// per-inference energy of the hop
    pub energy: f64,
    /// contribution to the objective: traversal fraction × energy
    pub cost: f64,
}

#[derive(Debug, Clone)]
pub struct FeasibleGraph<'g> {
    pub graph: &'g ExtendedGraph,
    pub gamma: usize,
    pub target_latency: f64,
    pub target_accuracy: f64,
    pub vertices: Vec<ReplicaVertex>,
    pub edges: Vec<FeasibleEdge>,
    pub adjacency: Vec<Vec<usize>>,
    /// depth-0 replicas of the data source
    pub sources: Vec<usize>,
    pub terminals: Vec<usize>,
    index: HashMap<ReplicaVertex, usize>,
}

/// `⌈γ (T + C) / δ⌉`.
pub fn edge_steepness(latency: f64, gamma: usize, delta: f64) -> f64 {
    (gamma as f64 * latency / delta).ceil()
}

/// Whether an edge stays within the application's bandwidth and compute share.
pub fn within_rate_limits(rate: f64, tau: f64, bits: f64, ops: f64, bandwidth: f64, compute: f64) -> bool {
    let load = rate * tau;
    !(load * bits > bandwidth || load * ops > compute)
}

/// Builds the feasible graph of `graph` for the targets of `app`.
pub fn build_feasible_graph<'g>(
    graph: &'g ExtendedGraph,
    app: &Application,
    gamma: usize,
) -> Result<FeasibleGraph<'g>, SolverError> {
    if gamma < 1 {
        return Err(SolverError::InvalidGamma);
    }
    let delta = app.target_latency;
    let alpha = app.target_accuracy;
    let rate = app.inference_rate;
    let width = gamma + 1;
    let nv = graph.vertices.len();

    // surviving extended edges with their steepness
    let candidates: Vec<(usize, usize)> = graph
        .edges
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let w = &e.weights;
            if !within_rate_limits(rate, w.traversal_fraction, w.data_bits, w.ops, w.bandwidth, w.compute) {
                return None;
            }
            let s = edge_steepness(w.latency(), gamma, delta);
            (s <= gamma as f64).then_some((i, s as usize))
        })
        .collect();

    let terminal_base: Vec<bool> = (0..nv)
        .map(|v| graph.exit_at(v).is_some_and(|e| e.accuracy >= alpha))
        .collect();

    // extended edges are stored in block order, so one sweep settles reachability
    let mut reach = vec![false; nv * width];
    reach[graph.source * width] = true;
    for &(ei, s) in &candidates {
        let e = &graph.edges[ei];
        for g in 0..width - s {
            if reach[e.from * width + g] {
                reach[e.to * width + g + s] = true;
            }
        }
    }
    let mut useful = vec![false; nv * width];
    for v in 0..nv {
        if terminal_base[v] {
            for g in 0..width {
                useful[v * width + g] = reach[v * width + g];
            }
        }
    }
    for &(ei, s) in candidates.iter().rev() {
        let e = &graph.edges[ei];
        for g in 0..width - s {
            if reach[e.from * width + g] && useful[e.to * width + g + s] {
                useful[e.from * width + g] = true;
            }
        }
    }

    let mut kept: Vec<ReplicaVertex> = (0..nv)
        .flat_map(|v| (0..width).map(move |g| ReplicaVertex { base: v, depth: g }))
        .filter(|r| useful[r.base * width + r.depth])
        .collect();
    kept.sort_by(|a, b| {
        let va = &graph.vertices[a.base];
        let vb = &graph.vertices[b.base];
        (va.block, a.depth, &va.node).cmp(&(vb.block, b.depth, &vb.node))
    });
    let index: HashMap<ReplicaVertex, usize> = kept.iter().enumerate().map(|(i, r)| (*r, i)).collect();

    let mut edges = Vec::new();
    let mut adjacency = vec![Vec::new(); kept.len()];
    for &(ei, s) in &candidates {
        let e = &graph.edges[ei];
        for g in 0..width - s {
            let tail = ReplicaVertex { base: e.from, depth: g };
            let head = ReplicaVertex { base: e.to, depth: g + s };
            if let (Some(&from), Some(&to)) = (index.get(&tail), index.get(&head)) {
                adjacency[from].push(edges.len());
                edges.push(FeasibleEdge {
                    from,
                    to,
                    base_edge: ei,
                    steepness: s,
                    energy: e.weights.energy,
                    cost: e.weights.traversal_fraction * e.weights.energy,
                });
            }
        }
    }

    let sources = index
        .get(&ReplicaVertex { base: graph.source, depth: 0 })
        .map(|&i| vec![i])
        .unwrap_or_default();
    let terminals = (0..kept.len()).filter(|&i| terminal_base[kept[i].base]).collect();

    Ok(FeasibleGraph {
        graph,
        gamma,
        target_latency: delta,
        target_accuracy: alpha,
        vertices: kept,
        edges,
        adjacency,
        sources,
        terminals,
        index,
    })
}

/// Best path found so far into a replica.
#[derive(Debug, Clone)]
struct Label {
    cost: f64,
    path: Vec<usize>,
}

impl<'g> FeasibleGraph<'g> {
    pub fn is_empty(&self) -> bool {
        self.sources.is_empty() || self.terminals.is_empty()
    }

    pub fn replica(&self, base: usize, depth: usize) -> Option<usize> {
        self.index.get(&ReplicaVertex { base, depth }).copied()
    }

    fn node_of(&self, v: usize) -> &str {
        &self.graph.vertices[self.vertices[v].base].node
    }

    fn nodes_of(&self, path: &[usize]) -> Vec<&str> {
        path.iter().skip(1).map(|&v| self.node_of(v)).collect()
    }

    fn compare(&self, a: &Label, b: &Label) -> Ordering {
        a.cost
            .total_cmp(&b.cost)
            .then_with(|| tie_break(&self.nodes_of(&a.path), &self.nodes_of(&b.path)))
    }

    fn is_terminal(&self, v: usize) -> bool {
        self.terminals.binary_search(&v).is_ok()
    }

    fn edge(&self, from: usize, to: usize) -> Option<&FeasibleEdge> {
        self.adjacency[from]
            .iter()
            .map(|&e| &self.edges[e])
            .find(|e| e.to == to)
    }

    /// Sum of edge steepness along a replica path; equals the depth gained.
    pub fn steepness(&self, path: &[usize]) -> Result<usize, SolverError> {
        path.windows(2).try_fold(0, |acc, pair| {
            self.edge(pair[0], pair[1])
                .map(|e| acc + e.steepness)
                .ok_or(SolverError::Disconnected(pair[0], pair[1]))
        })
    }

    /// Maps a replica path back onto the extended graph's vertices.
    pub fn base_path(&self, path: &[usize]) -> Vec<usize> {
        path.iter().map(|&v| self.vertices[v].base).collect()
    }

    fn solution(&self, path: &[usize], algorithm: Algorithm) -> Solution {
        let base = self.base_path(path);
        let (_, _, energy) = self.graph.path_energy(&base);
        Solution {
            configuration: Configuration::from_graph_path(self.graph, &base, algorithm),
            energy,
        }
    }

    /// Minimum-energy source-to-terminal path (DAG shortest path).
    ///
    /// Replicas are stored in (block, depth) order, which is topological.
    pub fn solve_exact(&self) -> Option<Solution> {
        let path = self.exact_path()?;
        Some(self.solution(&path, Algorithm::FinExact))
    }

    /// Replica path chosen by [`Self::solve_exact`].
    pub fn exact_path(&self) -> Option<Vec<usize>> {
        if self.is_empty() {
            return None;
        }
        let mut best: Vec<Option<Label>> = vec![None; self.vertices.len()];
        for &s in &self.sources {
            best[s] = Some(Label {
                cost: 0.0,
                path: vec![s],
            });
        }
        for v in 0..self.vertices.len() {
            let Some(label) = best[v].clone() else { continue };
            for &ei in &self.adjacency[v] {
                let e = &self.edges[ei];
                let mut path = label.path.clone();
                path.push(e.to);
                let candidate = Label {
                    cost: label.cost + e.cost,
                    path,
                };
                let better = match &best[e.to] {
                    None => true,
                    Some(current) => self.compare(&candidate, current) == Ordering::Less,
                };
                if better {
                    best[e.to] = Some(candidate);
                }
            }
        }
        self.terminals
            .iter()
            .filter_map(|&t| best[t].as_ref())
            .min_by(|a, b| self.compare(a, b))
            .map(|l| l.path.clone())
    }

    /// Greedy block-by-block traversal restricted to the λ-proximity window.
    ///
    /// From the current replica the cheapest outgoing edge whose head depth
    /// lies in `[γ − λ, γ]` is taken; if none does, the cheapest edge of any
    /// depth is taken. The walk stops at the first terminal replica reached.
    pub fn solve_greedy(&self, lambda: usize) -> Result<Option<Solution>, SolverError> {
        Ok(self
            .greedy_path(lambda)?
            .map(|p| self.solution(&p, Algorithm::FinGreedy)))
    }

    pub fn greedy_path(&self, lambda: usize) -> Result<Option<Vec<usize>>, SolverError> {
        if lambda < 1 || lambda > self.gamma {
            return Err(SolverError::InvalidLambda {
                lambda,
                gamma: self.gamma,
            });
        }
        let Some(&start) = self.sources.first() else {
            return Ok(None);
        };
        let floor = self.gamma - lambda;
        let mut path = vec![start];
        let mut current = start;
        while !(current != start && self.is_terminal(current)) {
            let outgoing: Vec<&FeasibleEdge> = self.adjacency[current].iter().map(|&e| &self.edges[e]).collect();
            if outgoing.is_empty() {
                return Ok(None);
            }
            let in_window: Vec<&FeasibleEdge> = outgoing
                .iter()
                .copied()
                .filter(|e| self.vertices[e.to].depth >= floor)
                .collect();
            let pool = if in_window.is_empty() { outgoing } else { in_window };
            let next = pool
                .into_iter()
                .min_by(|a, b| {
                    a.cost
                        .total_cmp(&b.cost)
                        .then_with(|| self.node_of(a.to).cmp(self.node_of(b.to)))
                        .then_with(|| self.vertices[a.to].depth.cmp(&self.vertices[b.to].depth))
                })
                .expect("non-empty pool");
            current = next.to;
            path.push(current);
        }
        Ok(Some(path))
    }

    pub fn to_dot(&self) -> String {
        let mut dot = DotWriter::new(&format!("feasible_{}_g{}", self.graph.app, self.gamma));
        for (i, r) in self.vertices.iter().enumerate() {
            let label = vertex_label(&self.graph.vertices[r.base], Some(r.depth));
            dot.vertex(i, &label, self.is_terminal(i));
        }
        for e in &self.edges {
            let w = &self.graph.edges[e.base_edge].weights;
            dot.edge(e.from, e.to, &format!("{}|s={}", weights_label(w), e.steepness));
        }
        dot.finish()
    }

    pub fn export_dot(&self, path: impl AsRef<Path>) -> io::Result<()> {
        std::fs::write(path, self.to_dot())
    }
}
