//! Reference solvers: the auxiliary-weight MCP heuristic and exhaustive Opt.

use crate::config::{tie_break, Algorithm, Configuration, EnergyAccumulator, Solution};
use crate::graph::{build_extended_graph, ExtendedGraph, GraphError, TraversalMode};
use crate::scenario::{Application, Scenario};
use std::cmp::Ordering;

/// Candidate budget for [`solve_opt`] unless overridden.
pub const DEFAULT_OPT_GUARD: f64 = 1e8;

/// Environment variable overriding [`DEFAULT_OPT_GUARD`].
pub const OPT_GUARD_ENV: &str = "FIN_OPT_GUARD";

#[derive(Debug, thiserror::Error)]
pub enum BaselineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("exhaustive search would visit {candidates:.3e} candidates (guard {guard:.3e})")]
    GuardExceeded { candidates: f64, guard: f64 },
}

/// Guard from [`OPT_GUARD_ENV`], falling back to [`DEFAULT_OPT_GUARD`].
pub fn opt_guard_from_env() -> f64 {
    std::env::var(OPT_GUARD_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<f64>().ok())
        .filter(|v| *v > 0.0)
        .unwrap_or(DEFAULT_OPT_GUARD)
}

/// `Ω(v, v') = (T + C)/δ + a(v')/α`.
pub fn aux_weight(latency: f64, accuracy: f64, delta: f64, alpha: f64) -> f64 {
    latency / delta + accuracy / alpha
}

/// Accuracy of the deepest exit at or before each block (0 before the first exit).
fn running_accuracy(graph: &ExtendedGraph) -> Vec<f64> {
    let mut acc = 0.0;
    graph
        .exits
        .iter()
        .map(|e| {
            if let Some(e) = e {
                acc = e.accuracy;
            }
            acc
        })
        .collect()
}

/// Minimum-Ω path from the source to any exit vertex.
///
/// Endpoints are not filtered by the target accuracy; whether the result
/// meets the constraints is left to the caller (see
/// [`crate::evaluation::evaluate`]).
pub fn solve_mcp(graph: &ExtendedGraph, app: &Application) -> Option<Solution> {
    let path = mcp_path(graph, app)?;
    let (_, _, energy) = graph.path_energy(&path);
    Some(Solution {
        configuration: Configuration::from_graph_path(graph, &path, Algorithm::Mcp),
        energy,
    })
}

pub fn mcp_path(graph: &ExtendedGraph, app: &Application) -> Option<Vec<usize>> {
    let accuracy = running_accuracy(graph);
    let delta = app.target_latency;
    let alpha = app.target_accuracy;
    let n = graph.vertices.len();
    let mut best: Vec<Option<(f64, Vec<usize>)>> = vec![None; n];
    best[graph.source] = Some((0.0, vec![graph.source]));
    let nodes = |p: &[usize]| -> Vec<&str> { p.iter().skip(1).map(|&v| graph.vertices[v].node.as_str()).collect() };
    let cmp = |a: &(f64, Vec<usize>), b: &(f64, Vec<usize>)| {
        a.0.total_cmp(&b.0)
            .then_with(|| tie_break(&nodes(&a.1), &nodes(&b.1)))
    };
    // vertices are laid out block by block, so index order is topological
    for v in 0..n {
        let Some((cost, path)) = best[v].clone() else { continue };
        for &ei in &graph.adjacency[v] {
            let e = &graph.edges[ei];
            let head_block = graph.vertices[e.to].block;
            let omega = aux_weight(e.weights.latency(), accuracy[head_block], delta, alpha);
            let mut p = path.clone();
            p.push(e.to);
            let candidate = (cost + omega, p);
            if best[e.to].as_ref().is_none_or(|cur| cmp(&candidate, cur) == Ordering::Less) {
                best[e.to] = Some(candidate);
            }
        }
    }
    (0..n)
        .filter(|&v| graph.exit_at(v).is_some())
        .filter_map(|v| best[v].as_ref())
        .min_by(|a, b| cmp(a, b))
        .map(|(_, p)| p.clone())
}

/// Upper bound on the number of complete configurations Opt may visit.
pub fn opt_search_space(graph: &ExtendedGraph, alpha: f64) -> f64 {
    let hosts = graph.vertices.iter().filter(|v| v.block == 1).count() as f64;
    (1..=graph.num_blocks())
        .filter(|&b| graph.exits[b].is_some_and(|e| e.accuracy >= alpha))
        .map(|b| hosts.powi(b as i32))
        .sum()
}

/// Exhaustive minimum-energy configuration of application `h`.
///
/// Every assignment of blocks `1..=k` to nodes, for every exit `k` meeting the
/// target accuracy, is checked against the latency, bandwidth and compute
/// constraints. Partial assignments are abandoned as soon as a constraint
/// fails: latency only grows along a path and the rate limits are per hop.
pub fn solve_opt(s: &Scenario, h: &str, mode: TraversalMode, guard: f64) -> Result<Option<Solution>, BaselineError> {
    let app = s.application(h).map_err(GraphError::from)?;
    let graph = build_extended_graph(s, h, mode)?;
    let candidates = opt_search_space(&graph, app.target_accuracy);
    if candidates > guard {
        return Err(BaselineError::GuardExceeded { candidates, guard });
    }
    let mut search = OptSearch {
        graph: &graph,
        delta: app.target_latency,
        alpha: app.target_accuracy,
        rate: app.inference_rate,
        path: vec![graph.source],
        best: None,
    };
    search.visit(graph.source, 0.0, EnergyAccumulator::default());
    Ok(search.best.map(|(energy, path)| Solution {
        configuration: Configuration::from_graph_path(&graph, &path, Algorithm::Opt),
        energy,
    }))
}

struct OptSearch<'g> {
    graph: &'g ExtendedGraph,
    delta: f64,
    alpha: f64,
    rate: f64,
    path: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
}

impl OptSearch<'_> {
    fn visit(&mut self, v: usize, latency: f64, acc: EnergyAccumulator) {
        if v != self.graph.source && self.graph.exit_at(v).is_some_and(|e| e.accuracy >= self.alpha) {
            let (_, _, total) = acc.per_second(self.rate);
            self.offer(total);
        }
        for &ei in &self.graph.adjacency[v] {
            let e = &self.graph.edges[ei];
            let w = &e.weights;
            let lat = latency + w.latency();
            if lat > self.delta {
                continue;
            }
            let load = self.rate * w.traversal_fraction;
            if load * w.data_bits > w.bandwidth || load * w.ops > w.compute {
                continue;
            }
            let mut next = acc;
            next.add_weights(w);
            self.path.push(e.to);
            self.visit(e.to, lat, next);
            self.path.pop();
        }
    }

    fn offer(&mut self, energy: f64) {
        let better = match &self.best {
            None => true,
            Some((e, p)) => {
                let nodes = |p: &[usize]| -> Vec<&str> {
                    p.iter().skip(1).map(|&v| self.graph.vertices[v].node.as_str()).collect()
                };
                energy
                    .total_cmp(e)
                    .then_with(|| tie_break(&nodes(&self.path), &nodes(p)))
                    == Ordering::Less
            }
        };
        if better {
            self.best = Some((energy, self.path.clone()));
        }
    }
}
