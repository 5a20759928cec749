//! Constraint checking, energy accounting and experiment drivers.
//!
//! [`evaluate`] recomputes everything about a configuration from the
//! scenario alone — it never looks at graph weights cached by the solvers —
//! so it doubles as an independent checker of solver output.

use crate::baselines::{opt_guard_from_env, solve_mcp, solve_opt, BaselineError};
use crate::config::{Algorithm, Configuration, EnergyAccumulator, Solution};
use crate::feasible::{build_feasible_graph, SolverError};
use crate::graph::{
    build_extended_graph, compute_time, edge_energy_split, transfer_time, traversal_fraction, GraphError,
    TraversalMode,
};
use crate::scenario::{Scenario, ScenarioError, SliceShare, SliceTarget, Tier};
use crate::units::serialize_f64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum EvaluationError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("malformed configuration for `{app}`: {reason}")]
    Malformed { app: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub satisfied: bool,
    /// distance to the bound; negative when violated, `inf` when unconstrained
    #[serde(serialize_with = "serialize_f64")]
    pub slack: f64,
}

impl Verdict {
    fn at_most(value: f64, bound: f64) -> Self {
        Verdict {
            satisfied: value <= bound,
            slack: bound - value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub app: String,
    pub algorithm: Algorithm,
    pub exit: usize,
    /// joules per second of inference stream
    pub total_energy: f64,
    pub comm_energy: f64,
    pub compute_energy: f64,
    /// expected joules per inference
    pub energy_per_inference: f64,
    pub comm_per_inference: f64,
    pub compute_per_inference: f64,
    /// seconds
    #[serde(serialize_with = "serialize_f64")]
    pub latency: f64,
    pub accuracy: f64,
    pub latency_check: Verdict,
    pub accuracy_check: Verdict,
    pub bandwidth_check: Verdict,
    pub compute_check: Verdict,
    pub feasible: bool,
    pub blocks_per_tier: BTreeMap<Tier, usize>,
}

impl EvaluationReport {
    /// `[mobile, edge, cloud]` block counts.
    pub fn split(&self) -> [usize; 3] {
        [Tier::Mobile, Tier::Edge, Tier::Cloud].map(|t| self.blocks_per_tier.get(&t).copied().unwrap_or(0))
    }
}

/// Evaluates `cfg` for application `h` against the scenario's current targets.
pub fn evaluate(
    s: &Scenario,
    h: &str,
    cfg: &Configuration,
    mode: TraversalMode,
) -> Result<EvaluationReport, EvaluationError> {
    let app = s.application(h)?;
    let malformed = |reason: String| EvaluationError::Malformed {
        app: h.to_string(),
        reason,
    };
    if cfg.placements.is_empty() {
        return Err(malformed("no blocks placed".into()));
    }
    for (i, p) in cfg.placements.iter().enumerate() {
        if p.block != i + 1 {
            return Err(malformed(format!("placement {} carries block {}", i + 1, p.block)));
        }
    }
    let last = cfg.placements.len();
    let exit = app
        .block(last)?
        .exit
        .as_ref()
        .ok_or_else(|| malformed(format!("block {last} has no exit")))?;
    if exit.index != cfg.exit {
        return Err(malformed(format!("block {last} carries exit {}, not {}", exit.index, cfg.exit)));
    }

    let rate = app.inference_rate;
    let mut energy = EnergyAccumulator::default();
    let mut latency = 0.0;
    let mut bandwidth = Verdict { satisfied: true, slack: f64::INFINITY };
    let mut compute = Verdict { satisfied: true, slack: f64::INFINITY };
    let mut sender = s.node(&app.source_node)?;
    for p in &cfg.placements {
        let receiver = s.node(&p.node)?;
        let bits = app.output_bits(p.block - 1)?;
        let ops = app.block(p.block)?.total_ops();
        let tau = traversal_fraction(app, p.block, mode)?;
        let b = s.effective_bandwidth(h, &sender.id, &receiver.id)?;
        let c = s.effective_compute(h, &receiver.id)?;

        // a hop without a link or without compute can never be carried out
        let t = if b > 0.0 { transfer_time(bits, b) } else { f64::INFINITY };
        let comp = if c > 0.0 { compute_time(ops, c) } else { f64::INFINITY };
        latency += t + comp;
        let hop_b = Verdict::at_most(rate * tau * bits, b);
        bandwidth.satisfied &= hop_b.satisfied && b > 0.0;
        bandwidth.slack = bandwidth.slack.min(hop_b.slack);
        let hop_c = Verdict::at_most(rate * tau * ops, c);
        compute.satisfied &= hop_c.satisfied && c > 0.0;
        compute.slack = compute.slack.min(hop_c.slack);

        let e = edge_energy_split(bits, ops, sender, receiver);
        energy.add(tau, e.comm, e.compute);
        sender = receiver;
    }

    let (comm_energy, compute_energy, total_energy) = energy.per_second(rate);
    let latency_check = Verdict::at_most(latency, app.target_latency);
    let accuracy_check = Verdict {
        satisfied: exit.accuracy >= app.target_accuracy,
        slack: exit.accuracy - app.target_accuracy,
    };
    let (bandwidth_check, compute_check) = (bandwidth, compute);
    let feasible =
        latency_check.satisfied && accuracy_check.satisfied && bandwidth_check.satisfied && compute_check.satisfied;
    Ok(EvaluationReport {
        app: h.to_string(),
        algorithm: cfg.algorithm,
        exit: cfg.exit,
        total_energy,
        comm_energy,
        compute_energy,
        energy_per_inference: energy.comm + energy.compute,
        comm_per_inference: energy.comm,
        compute_per_inference: energy.compute,
        latency,
        accuracy: exit.accuracy,
        latency_check,
        accuracy_check,
        bandwidth_check,
        compute_check,
        feasible,
        blocks_per_tier: cfg.blocks_per_tier(s)?,
    })
}

// ---------------------------------------------------------------------------
// Solving
// ---------------------------------------------------------------------------

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
    #[error("algorithm `{0}` cannot be solved")]
    Unsupported(Algorithm),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveParams {
    pub gamma: usize,
    /// defaults to `gamma`
    pub lambda: Option<usize>,
    pub mode: TraversalMode,
    pub opt_guard: f64,
    /// record solver wall time; off keeps outputs reproducible
    pub timing: bool,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            gamma: 10,
            lambda: None,
            mode: TraversalMode::Survival,
            opt_guard: opt_guard_from_env(),
            timing: false,
        }
    }
}

impl SolveParams {
    pub fn lambda(&self) -> usize {
        self.lambda.unwrap_or(self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub algorithm: Algorithm,
    pub solution: Option<Solution>,
    pub report: Option<EvaluationReport>,
    pub wall_ms: f64,
}

impl Outcome {
    /// A configuration was returned and passes every constraint.
    pub fn feasible(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.feasible)
    }
}

/// Runs `algo` on application `h` and evaluates whatever it returns.
pub fn solve(s: &Scenario, h: &str, algo: Algorithm, params: &SolveParams) -> Result<Outcome, SolveError> {
    let app = s.application(h)?;
    let start = Instant::now();
    let solution = match algo {
        Algorithm::FinExact | Algorithm::FinGreedy => {
            let g = build_extended_graph(s, h, params.mode)?;
            let fg = build_feasible_graph(&g, app, params.gamma)?;
            if algo == Algorithm::FinExact {
                fg.solve_exact()
            } else {
                fg.solve_greedy(params.lambda())?
            }
        }
        Algorithm::Mcp => {
            let g = build_extended_graph(s, h, params.mode)?;
            solve_mcp(&g, app)
        }
        Algorithm::Opt => solve_opt(s, h, params.mode, params.opt_guard)?,
        Algorithm::Manual => return Err(SolveError::Unsupported(algo)),
    };
    let wall_ms = if params.timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    let report = solution
        .as_ref()
        .map(|sol| evaluate(s, h, &sol.configuration, params.mode))
        .transpose()?;
    Ok(Outcome {
        algorithm: algo,
        solution,
        report,
        wall_ms,
    })
}

// ---------------------------------------------------------------------------
// Result rows
// ---------------------------------------------------------------------------

/// One CSV-ready result line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRow {
    pub algorithm: Algorithm,
    pub app: String,
    pub gamma: Option<usize>,
    pub lambda: Option<usize>,
    pub axis: String,
    /// axis value in display units (ms for delta, % for alpha)
    pub value: f64,
    pub feasible: bool,
    pub exit: Option<usize>,
    pub latency_ms: Option<f64>,
    pub accuracy_pct: Option<f64>,
    pub total_mj: Option<f64>,
    pub comm_mj: Option<f64>,
    pub compute_mj: Option<f64>,
    pub blocks: Option<[usize; 3]>,
    pub wall_ms: f64,
}

impl RunRow {
    pub fn new(outcome: &Outcome, app: &str, params: &SolveParams, axis: &str, value: f64) -> Self {
        let algo = outcome.algorithm;
        let r = outcome.report.as_ref();
        RunRow {
            algorithm: algo,
            app: app.to_string(),
            gamma: algo.uses_gamma().then_some(params.gamma),
            lambda: algo.uses_lambda().then_some(params.lambda()),
            axis: axis.to_string(),
            value,
            feasible: outcome.feasible(),
            exit: r.map(|r| r.exit),
            latency_ms: r.map(|r| r.latency * 1e3),
            accuracy_pct: r.map(|r| r.accuracy * 1e2),
            total_mj: r.map(|r| r.energy_per_inference * 1e3),
            comm_mj: r.map(|r| r.comm_per_inference * 1e3),
            compute_mj: r.map(|r| r.compute_per_inference * 1e3),
            blocks: r.map(|r| r.split()),
            wall_ms: outcome.wall_ms,
        }
    }

    fn key(&self) -> (Algorithm, &str, &str, f64) {
        (self.algorithm, &self.app, &self.axis, self.value)
    }
}

/// Sorts rows by (algorithm, app, axis, value).
pub fn sort_rows(rows: &mut [RunRow]) {
    rows.sort_by(|a, b| {
        let (ka, kb) = (a.key(), b.key());
        (ka.0, ka.1, ka.2)
            .cmp(&(kb.0, kb.1, kb.2))
            .then(ka.3.total_cmp(&kb.3))
    });
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepAxis {
    Delta,
    Alpha,
    Gamma,
    Lambda,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Delta => "delta",
            SweepAxis::Alpha => "alpha",
            SweepAxis::Gamma => "gamma",
            SweepAxis::Lambda => "lambda",
        }
    }

    /// Converts an SI axis value to the unit written in result rows.
    pub fn display(self, value: f64) -> f64 {
        match self {
            SweepAxis::Delta => value * 1e3,
            SweepAxis::Alpha => value * 1e2,
            SweepAxis::Gamma | SweepAxis::Lambda => value,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("sweep needs at least one value")]
    Empty,
    #[error("{axis} value {value} is not usable")]
    BadValue { axis: &'static str, value: f64 },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Solves `h` with each algorithm at each axis value (SI units).
pub fn sweep(
    s: &Scenario,
    h: &str,
    algorithms: &[Algorithm],
    axis: SweepAxis,
    values: &[f64],
    params: &SolveParams,
) -> Result<Vec<RunRow>, SweepError> {
    if values.is_empty() {
        return Err(SweepError::Empty);
    }
    let app = s.application(h).map_err(SolveError::from)?;
    let bad = |value: f64| SweepError::BadValue {
        axis: axis.as_str(),
        value,
    };
    let mut rows = Vec::with_capacity(values.len() * algorithms.len());
    for &value in values {
        let mut p = *params;
        let scenario = match axis {
            SweepAxis::Delta | SweepAxis::Alpha => {
                let valid = match axis {
                    SweepAxis::Delta => value > 0.0,
                    _ => value > 0.0 && value <= 1.0,
                };
                if !valid {
                    return Err(bad(value));
                }
                let targeted = if axis == SweepAxis::Delta {
                    app.with_targets(None, Some(value))
                } else {
                    app.with_targets(Some(value), None)
                };
                s.with_application(targeted).map_err(SolveError::from)?
            }
            SweepAxis::Gamma | SweepAxis::Lambda => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(bad(value));
                }
                if axis == SweepAxis::Gamma {
                    p.gamma = value as usize;
                } else {
                    p.lambda = Some(value as usize);
                }
                s.clone()
            }
        };
        for &algo in algorithms {
            let outcome = solve(&scenario, h, algo, &p)?;
            rows.push(RunRow::new(&outcome, h, &p, axis.as_str(), axis.display(value)));
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Multi-application experiment
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserRun {
    pub user: usize,
    pub app: String,
    /// position in the admission order
    pub admitted_at: usize,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AppSummary {
    pub runs: usize,
    pub failures: usize,
    pub failure_probability: f64,
    /// J/s summed over feasible runs
    pub total_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub failures: usize,
    pub failure_probability: f64,
    /// J/s summed over feasible runs
    pub total_energy: f64,
    /// Σ energy / Σ MCP energy over runs where both are feasible
    pub energy_ratio_vs_mcp: Option<f64>,
    /// runs (both feasible) where this algorithm spent more than MCP
    pub worse_than_mcp: usize,
    /// share of deployed blocks per tier over feasible runs
    pub tier_probability: BTreeMap<Tier, f64>,
    /// share of feasible runs terminating at each exit
    pub exit_probability: BTreeMap<usize, f64>,
    pub per_app: BTreeMap<String, AppSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiAppResult {
    pub users: usize,
    pub seed: u64,
    pub runs: Vec<UserRun>,
    pub summaries: Vec<AlgorithmSummary>,
}

impl MultiAppResult {
    pub fn summary(&self, algo: Algorithm) -> Option<&AlgorithmSummary> {
        self.summaries.iter().find(|s| s.algorithm == algo)
    }

    /// Per-user rows, sorted by (algorithm, app, user).
    pub fn rows(&self, params: &SolveParams) -> Vec<RunRow> {
        let mut rows: Vec<RunRow> = self
            .runs
            .iter()
            .map(|r| RunRow::new(&r.outcome, &r.app, params, "user", r.user as f64))
            .collect();
        sort_rows(&mut rows);
        rows
    }
}

/// Who draws from a capacity pool: per-user nodes belong to their user,
/// sliced resources to their application, anything else is shared.
type PoolKey = (String, Option<usize>, Option<String>);

#[derive(Debug, Default)]
struct Usage {
    compute: BTreeMap<PoolKey, f64>,
    uplink: BTreeMap<PoolKey, f64>,
    downlink: BTreeMap<PoolKey, f64>,
}

fn per_user(tier: Tier) -> bool {
    matches!(tier, Tier::Mobile | Tier::Source)
}

fn declared_share(s: &Scenario, app: &str, node: &str) -> (Option<f64>, Option<f64>) {
    s.slices
        .iter()
        .find(|sl| sl.app == app && sl.target == SliceTarget::Node(node.to_string()))
        .map_or((None, None), |sl| (sl.compute_fraction, sl.bandwidth_fraction))
}

fn residual(capacity: f64, fraction: f64, used: f64) -> f64 {
    if !capacity.is_finite() || capacity <= 0.0 {
        return fraction;
    }
    ((capacity * fraction - used) / capacity).clamp(0.0, fraction)
}

impl Usage {
    fn key(s: &Scenario, node: &str, user: usize, app: &str, sliced: bool) -> PoolKey {
        let tier = s.node(node).map(|n| n.tier).unwrap_or(Tier::Cloud);
        (
            node.to_string(),
            per_user(tier).then_some(user),
            sliced.then(|| app.to_string()),
        )
    }

    /// The scenario as seen by `app` of `user` once earlier admissions are subtracted.
    fn view(&self, s: &Scenario, user: usize, app: &str) -> Scenario {
        let mut view = s.clone();
        view.slices
            .retain(|sl| !(sl.app == app && matches!(sl.target, SliceTarget::Node(_))));
        for node in &s.nodes {
            let (cf, bf) = declared_share(s, app, &node.id);
            let ck = Usage::key(s, &node.id, user, app, cf.is_some());
            let bk = Usage::key(s, &node.id, user, app, bf.is_some());
            let compute = residual(
                node.compute_capacity,
                cf.unwrap_or(1.0),
                self.compute.get(&ck).copied().unwrap_or(0.0),
            );
            let bandwidth = residual(
                node.uplink_capacity,
                bf.unwrap_or(1.0),
                self.uplink.get(&bk).copied().unwrap_or(0.0),
            )
            .min(residual(
                node.downlink_capacity,
                bf.unwrap_or(1.0),
                self.downlink.get(&bk).copied().unwrap_or(0.0),
            ));
            view.slices.push(SliceShare {
                app: app.to_string(),
                target: SliceTarget::Node(node.id.clone()),
                compute_fraction: Some(compute),
                bandwidth_fraction: Some(bandwidth),
            });
        }
        view
    }

    fn admit(&mut self, s: &Scenario, user: usize, app: &str, cfg: &Configuration, mode: TraversalMode) -> Result<(), ScenarioError> {
        let a = s.application(app)?;
        let mut sender = a.source_node.clone();
        for p in &cfg.placements {
            let load = a.inference_rate * traversal_fraction(a, p.block, mode)?;
            let (cf, _) = declared_share(s, app, &p.node);
            *self
                .compute
                .entry(Usage::key(s, &p.node, user, app, cf.is_some()))
                .or_insert(0.0) += load * a.block(p.block)?.total_ops();
            if sender != p.node {
                let bits = load * a.output_bits(p.block - 1)?;
                let (_, sbf) = declared_share(s, app, &sender);
                let (_, rbf) = declared_share(s, app, &p.node);
                *self
                    .uplink
                    .entry(Usage::key(s, &sender, user, app, sbf.is_some()))
                    .or_insert(0.0) += bits;
                *self
                    .downlink
                    .entry(Usage::key(s, &p.node, user, app, rbf.is_some()))
                    .or_insert(0.0) += bits;
            }
            sender = p.node.clone();
        }
        Ok(())
    }
}

/// Every one of `users` users runs every application of `s` at its own rate.
///
/// Mobile and source nodes are cloned per user; edge and cloud nodes are
/// shared, each application drawing on its own slice. Users are admitted one
/// by one in a seeded random order and each admitted configuration consumes
/// the capacity it needs, so later users see only what is left. Every
/// algorithm runs the whole experiment in its own copy of the system.
pub fn run_multi_app(
    s: &Scenario,
    users: usize,
    algorithms: &[Algorithm],
    seed: u64,
    params: &SolveParams,
) -> Result<MultiAppResult, SolveError> {
    let mut order: Vec<(usize, String)> = (0..users)
        .flat_map(|u| s.applications.iter().map(move |a| (u, a.id.clone())))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut runs = Vec::with_capacity(order.len() * algorithms.len());
    for &algo in algorithms {
        let mut usage = Usage::default();
        for (pos, (user, app)) in order.iter().enumerate() {
            let view = usage.view(s, *user, app);
            let outcome = solve(&view, app, algo, params)?;
            if outcome.feasible() {
                let cfg = &outcome.solution.as_ref().expect("feasible outcome has a solution").configuration;
                usage.admit(s, *user, app, cfg, params.mode)?;
            }
            runs.push(UserRun {
                user: *user,
                app: app.clone(),
                admitted_at: pos,
                outcome,
            });
        }
    }
    runs.sort_by(|a, b| {
        (a.outcome.algorithm, &a.app, a.user).cmp(&(b.outcome.algorithm, &b.app, b.user))
    });
    let summaries = algorithms.iter().map(|&a| summarize(&runs, a)).collect();
    Ok(MultiAppResult {
        users,
        seed,
        runs,
        summaries,
    })
}

fn energy_of(run: &UserRun) -> Option<f64> {
    run.outcome
        .report
        .as_ref()
        .filter(|r| r.feasible)
        .map(|r| r.total_energy)
}

fn summarize(runs: &[UserRun], algo: Algorithm) -> AlgorithmSummary {
    let mine: Vec<&UserRun> = runs.iter().filter(|r| r.outcome.algorithm == algo).collect();
    let mcp: BTreeMap<(usize, &str), f64> = runs
        .iter()
        .filter(|r| r.outcome.algorithm == Algorithm::Mcp)
        .filter_map(|r| energy_of(r).map(|e| ((r.user, r.app.as_str()), e)))
        .collect();

    let mut per_app: BTreeMap<String, AppSummary> = BTreeMap::new();
    let mut tiers: BTreeMap<Tier, usize> = BTreeMap::new();
    let mut exits: BTreeMap<usize, usize> = BTreeMap::new();
    let mut failures = 0;
    let mut total_energy = 0.0;
    let (mut ours, mut theirs, mut worse, mut paired) = (0.0, 0.0, 0, 0);
    for r in &mine {
        let entry = per_app.entry(r.app.clone()).or_default();
        entry.runs += 1;
        match energy_of(r) {
            None => {
                failures += 1;
                entry.failures += 1;
            }
            Some(e) => {
                total_energy += e;
                entry.total_energy += e;
                let report = r.outcome.report.as_ref().expect("feasible run has a report");
                for (tier, n) in &report.blocks_per_tier {
                    *tiers.entry(*tier).or_insert(0) += n;
                }
                *exits.entry(report.exit).or_insert(0) += 1;
                if let Some(&m) = mcp.get(&(r.user, r.app.as_str())) {
                    ours += e;
                    theirs += m;
                    paired += 1;
                    if e > m {
                        worse += 1;
                    }
                }
            }
        }
    }
    for a in per_app.values_mut() {
        a.failure_probability = ratio(a.failures, a.runs);
    }
    let blocks: usize = tiers.values().sum();
    let feasible_runs = mine.len() - failures;
    AlgorithmSummary {
        algorithm: algo,
        runs: mine.len(),
        failures,
        failure_probability: ratio(failures, mine.len()),
        total_energy,
        energy_ratio_vs_mcp: (paired > 0 && theirs > 0.0).then(|| ours / theirs),
        worse_than_mcp: worse,
        tier_probability: tiers.into_iter().map(|(t, n)| (t, ratio(n, blocks))).collect(),
        exit_probability: exits.into_iter().map(|(e, n)| (e, ratio(n, feasible_runs))).collect(),
        per_app,
    }
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}
