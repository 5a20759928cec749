//! Minimum-energy placement of early-exit DNN blocks on mobile/edge/cloud
//! networks under latency, accuracy, bandwidth and compute constraints.
//!
//! The pipeline: a [`Scenario`] is loaded from JSON, an [`ExtendedGraph`] of
//! (node, block) vertices is built per application, and the depth-replicated
//! [`FeasibleGraph`] turns the latency budget into topology so a plain
//! shortest path (or the greedy traversal) yields a feasible configuration.
//! [`baselines`] holds the MCP heuristic and the exhaustive optimum;
//! [`evaluation`] rechecks any configuration from first principles.

pub mod baselines;
pub mod cli;
pub mod config;
pub mod evaluation;
pub mod feasible;
pub mod graph;
pub mod scenario;
pub mod units;

pub use baselines::{solve_mcp, solve_opt};
pub use config::{Algorithm, Configuration, Placement, Solution};
pub use evaluation::{evaluate, run_multi_app, solve, sweep, EvaluationReport, SolveParams};
pub use feasible::{build_feasible_graph, FeasibleGraph};
pub use graph::{build_extended_graph, ExtendedGraph, TraversalMode};
pub use scenario::{Application, Scenario, ScenarioError, Tier};
