//! `fin` command-line interface.

use crate::baselines::BaselineError;
use crate::config::Algorithm;
use crate::evaluation::{
    run_multi_app, solve, sweep, EvaluationError, Outcome, RunRow, SolveError, SolveParams, SweepAxis, SweepError,
};
use crate::feasible::build_feasible_graph;
use crate::graph::{build_extended_graph, GraphError, TraversalMode};
use crate::scenario::{Scenario, ScenarioError};
use crate::units::{parse_quantity, Dimension, UnitError};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// Column order of every result CSV.
pub const CSV_HEADER: [&str; 17] = [
    "algorithm",
    "app",
    "gamma",
    "lambda",
    "axis",
    "value",
    "feasible",
    "exit",
    "latency_ms",
    "accuracy_pct",
    "total_mJ",
    "comm_mJ",
    "compute_mJ",
    "blocks_mobile",
    "blocks_edge",
    "blocks_cloud",
    "wall_ms",
];

pub mod exit_code {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const INFEASIBLE: i32 = 4;
    pub const GUARD: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "fin", version, about = "Energy-minimal early-exit DNN placement on mobile/edge/cloud networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a scenario, then print a summary
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Solve one application with one algorithm
    Solve(SolveArgs),
    /// Solve over a range of targets or parameters and write CSV
    Sweep(SweepArgs),
    /// Multi-user, multi-application experiment; writes per-user CSV
    Multiapp(MultiAppArgs),
    /// Write the extended graph (or, with --gamma, the feasible graph) as DOT
    ExportGraph(ExportArgs),
}

#[derive(Debug, Args)]
pub struct TargetArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub app: String,
    #[arg(long, value_enum, default_value_t = TraversalMode::Survival)]
    pub mode: TraversalMode,
    /// target accuracy: a fraction (0.8) or a percentage (80%)
    #[arg(long)]
    pub alpha: Option<String>,
    /// target latency: milliseconds (5) or with a unit (5ms, 0.1 s)
    #[arg(long)]
    pub delta: Option<String>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long, value_enum, default_value_t = Algorithm::FinExact)]
    pub algo: Algorithm,
    /// feasible-graph depth (fin-exact, fin-greedy; default 10)
    #[arg(long)]
    pub gamma: Option<usize>,
    /// proximity window (fin-greedy; default gamma)
    #[arg(long)]
    pub lambda: Option<usize>,
    /// JSON result file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// record solver wall time
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algorithm::FinExact, Algorithm::Mcp, Algorithm::Opt])]
    pub algo: Vec<Algorithm>,
    #[arg(long, value_enum)]
    pub axis: SweepAxis,
    /// comma-separated axis values, same conventions as --delta/--alpha
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<String>,
    #[arg(long)]
    pub gamma: Option<usize>,
    #[arg(long)]
    pub lambda: Option<usize>,
    /// sweeps are deterministic; accepted for uniformity with multiapp
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct MultiAppArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub users: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algorithm::FinExact, Algorithm::Mcp])]
    pub algo: Vec<Algorithm>,
    #[arg(long)]
    pub gamma: Option<usize>,
    #[arg(long)]
    pub lambda: Option<usize>,
    #[arg(long, value_enum, default_value_t = TraversalMode::Survival)]
    pub mode: TraversalMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// per-user CSV; the aggregate goes to `<out>.summary.json`
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long)]
    pub gamma: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Unit(#[from] UnitError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Solve(SolveError::Graph(e))
    }
}

impl From<crate::feasible::SolverError> for CliError {
    fn from(e: crate::feasible::SolverError) -> Self {
        CliError::Solve(SolveError::Solver(e))
    }
}

fn scenario_code(e: &ScenarioError) -> i32 {
    match e {
        ScenarioError::Io { .. } | ScenarioError::Parse { .. } | ScenarioError::Unit { .. } => exit_code::PARSE,
        _ => exit_code::VALIDATION,
    }
}

fn solve_code(e: &SolveError) -> i32 {
    match e {
        SolveError::Scenario(s)
        | SolveError::Graph(GraphError::Scenario(s))
        | SolveError::Evaluation(EvaluationError::Scenario(s))
        | SolveError::Baseline(BaselineError::Graph(GraphError::Scenario(s))) => scenario_code(s),
        SolveError::Baseline(BaselineError::GuardExceeded { .. }) => exit_code::GUARD,
        SolveError::Graph(GraphError::NoSourceEdges { .. })
        | SolveError::Baseline(BaselineError::Graph(GraphError::NoSourceEdges { .. })) => exit_code::VALIDATION,
        _ => exit_code::USAGE,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scenario(e) => scenario_code(e),
            CliError::Solve(e) | CliError::Sweep(SweepError::Solve(e)) => solve_code(e),
            _ => exit_code::USAGE,
        }
    }
}

/// Parses `--alpha`: a fraction in (0, 1] or a percentage with `%`.
pub fn parse_alpha(text: &str) -> Result<f64, CliError> {
    let v = parse_quantity(text, Dimension::Fraction)?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("accuracy target {text:?} must lie in (0, 1] or (0%, 100%]")))
    }
}

/// Parses `--delta`: bare numbers are milliseconds, suffixed values are converted.
pub fn parse_delta(text: &str) -> Result<f64, CliError> {
    let bare = text.trim().parse::<f64>();
    let v = match bare {
        Ok(ms) => ms * 1e-3,
        Err(_) => parse_quantity(text, Dimension::Time)?,
    };
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("latency target {text:?} must be positive")))
    }
}

/// Loads the scenario and applies the --alpha/--delta overrides of `t.app`.
fn load_targeted(t: &TargetArgs) -> Result<Scenario, CliError> {
    let s = Scenario::load(&t.scenario)?;
    let app = s.application(&t.app)?;
    let alpha = t.alpha.as_deref().map(parse_alpha).transpose()?;
    let delta = t.delta.as_deref().map(parse_delta).transpose()?;
    Ok(s.with_application(app.with_targets(alpha, delta))?)
}

fn params(algos: &[Algorithm], gamma: Option<usize>, lambda: Option<usize>, mode: TraversalMode, timing: bool) -> Result<SolveParams, CliError> {
    if gamma.is_some() && !algos.iter().any(|a| a.uses_gamma()) {
        return Err(CliError::Usage("--gamma only applies to fin-exact and fin-greedy".into()));
    }
    if lambda.is_some() && !algos.iter().any(|a| a.uses_lambda()) {
        return Err(CliError::Usage("--lambda only applies to fin-greedy".into()));
    }
    let p = SolveParams {
        gamma: gamma.unwrap_or(10),
        lambda,
        mode,
        timing,
        ..SolveParams::default()
    };
    if p.gamma < 1 {
        return Err(CliError::Usage("--gamma must be at least 1".into()));
    }
    if let Some(l) = lambda {
        if l < 1 || l > p.gamma {
            return Err(CliError::Usage(format!("--lambda must lie in 1..={}", p.gamma)));
        }
    }
    Ok(p)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Validate { scenario } => cmd_validate(&scenario),
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Multiapp(a) => cmd_multiapp(a),
        Command::ExportGraph(a) => cmd_export(a),
    }
}

fn cmd_validate(path: &Path) -> Result<i32, CliError> {
    let s = Scenario::load(path)?;
    let mut out = io::stdout().lock();
    let _ = writeln!(
        out,
        "{}: {} nodes, {} links, {} slices, {} applications",
        path.display(),
        s.nodes.len(),
        s.links.len(),
        s.slices.len(),
        s.applications.len()
    );
    for n in &s.nodes {
        let _ = writeln!(out, "  node {:<12} {:<7} {:.4e} ops/s", n.id, n.tier.as_str(), n.compute_capacity);
    }
    for a in &s.applications {
        let _ = writeln!(
            out,
            "  app  {:<18} {} blocks, {} exits, delta {} ms, alpha {}%",
            a.id,
            a.num_blocks(),
            a.exits().count(),
            a.target_latency * 1e3,
            a.target_accuracy * 1e2
        );
    }
    Ok(exit_code::OK)
}

#[derive(Serialize)]
struct SolveRecord<'a> {
    app: &'a str,
    algorithm: Algorithm,
    gamma: Option<usize>,
    lambda: Option<usize>,
    mode: TraversalMode,
    target_latency: f64,
    target_accuracy: f64,
    feasible: bool,
    #[serde(flatten)]
    outcome: &'a Outcome,
}

fn cmd_solve(a: SolveArgs) -> Result<i32, CliError> {
    let s = load_targeted(&a.target)?;
    let p = params(&[a.algo], a.gamma, a.lambda, a.target.mode, a.timing)?;
    let h = &a.target.app;
    let outcome = solve(&s, h, a.algo, &p)?;
    let app = s.application(h)?;
    let record = SolveRecord {
        app: h,
        algorithm: a.algo,
        gamma: a.algo.uses_gamma().then_some(p.gamma),
        lambda: a.algo.uses_lambda().then_some(p.lambda()),
        mode: p.mode,
        target_latency: app.target_latency,
        target_accuracy: app.target_accuracy,
        feasible: outcome.feasible(),
        outcome: &outcome,
    };
    let mut json = serde_json::to_string_pretty(&record).expect("result serializes");
    json.push('\n');

    print_table(&RunRow::new(&outcome, h, &p, "", 0.0), &outcome);
    match &a.out {
        Some(path) => write_file(path, json.as_bytes())?,
        None => print!("{json}"),
    }
    Ok(if outcome.feasible() {
        exit_code::OK
    } else {
        exit_code::INFEASIBLE
    })
}

fn print_table(row: &RunRow, outcome: &Outcome) {
    let mut out = io::stdout().lock();
    let _ = writeln!(out, "algorithm  {}", row.algorithm);
    let _ = writeln!(out, "app        {}", row.app);
    let _ = writeln!(out, "feasible   {}", row.feasible);
    let Some(sol) = &outcome.solution else {
        let _ = writeln!(out, "no configuration found");
        return;
    };
    let _ = writeln!(out, "placement  {}", sol.configuration.nodes().join(" -> "));
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6}"));
    if let Some(b) = row.blocks {
        let _ = writeln!(out, "split      [{},{},{}] (mobile, edge, cloud)", b[0], b[1], b[2]);
    }
    let _ = writeln!(out, "exit       {}", row.exit.map_or("-".into(), |e| e.to_string()));
    let _ = writeln!(out, "latency    {} ms", fmt(row.latency_ms));
    let _ = writeln!(out, "accuracy   {} %", fmt(row.accuracy_pct));
    let _ = writeln!(out, "energy     {} mJ/inference", fmt(row.total_mj));
    let _ = writeln!(out, "power      {:.6e} W", sol.energy);
}

fn parse_axis_values(axis: SweepAxis, values: &[String]) -> Result<Vec<f64>, CliError> {
    values
        .iter()
        .map(|v| match axis {
            SweepAxis::Delta => parse_delta(v),
            SweepAxis::Alpha => parse_alpha(v),
            SweepAxis::Gamma | SweepAxis::Lambda => v
                .trim()
                .parse::<usize>()
                .map(|n| n as f64)
                .map_err(|_| CliError::Usage(format!("{} value {v:?} is not a positive integer", axis.as_str()))),
        })
        .collect()
}

fn cmd_sweep(a: SweepArgs) -> Result<i32, CliError> {
    let s = load_targeted(&a.target)?;
    let values = parse_axis_values(a.axis, &a.values)?;
    let mut algos = a.algo.clone();
    algos.sort();
    algos.dedup();
    let p = match a.axis {
        // the swept parameter is set per row
        SweepAxis::Gamma | SweepAxis::Lambda => {
            let needs = if a.axis == SweepAxis::Gamma {
                Algorithm::uses_gamma
            } else {
                Algorithm::uses_lambda
            };
            if !algos.iter().any(|&x| needs(x)) {
                return Err(CliError::Usage(format!("no selected algorithm uses {}", a.axis.as_str())));
            }
            let mut p = params(&algos, a.gamma, None, a.target.mode, a.timing)?;
            if a.axis == SweepAxis::Lambda {
                if let Some(max) = values.iter().copied().reduce(f64::max) {
                    if a.gamma.is_none() {
                        p.gamma = p.gamma.max(max as usize);
                    }
                }
            }
            if a.axis == SweepAxis::Gamma && a.lambda.is_some() {
                return Err(CliError::Usage("--lambda cannot be fixed while sweeping gamma".into()));
            }
            p
        }
        _ => params(&algos, a.gamma, a.lambda, a.target.mode, a.timing)?,
    };
    let rows = sweep(&s, &a.target.app, &algos, a.axis, &values, &p)?;
    emit_csv(&rows, a.out.as_deref())?;
    Ok(exit_code::OK)
}

fn cmd_multiapp(a: MultiAppArgs) -> Result<i32, CliError> {
    if a.users < 1 {
        return Err(CliError::Usage("--users must be at least 1".into()));
    }
    let s = Scenario::load(&a.scenario)?;
    let mut algos = a.algo.clone();
    algos.sort();
    algos.dedup();
    let p = params(&algos, a.gamma, a.lambda, a.mode, a.timing)?;
    let result = run_multi_app(&s, a.users, &algos, a.seed, &p)?;
    emit_csv(&result.rows(&p), a.out.as_deref())?;

    #[derive(Serialize)]
    struct Summary<'a> {
        users: usize,
        seed: u64,
        applications: Vec<&'a str>,
        summaries: &'a [crate::evaluation::AlgorithmSummary],
    }
    let summary = Summary {
        users: result.users,
        seed: result.seed,
        applications: s.applications.iter().map(|x| x.id.as_str()).collect(),
        summaries: &result.summaries,
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    if let Some(out) = &a.out {
        let mut name = out.as_os_str().to_owned();
        name.push(".summary.json");
        write_file(Path::new(&name), json.as_bytes())?;
    }
    let mut err = io::stderr().lock();
    for sm in &result.summaries {
        let _ = writeln!(
            err,
            "{:<10} runs {:>5}  failures {:>5} ({:.2}%)  energy {:.6e} W  vs mcp {}",
            sm.algorithm.as_str(),
            sm.runs,
            sm.failures,
            sm.failure_probability * 100.0,
            sm.total_energy,
            sm.energy_ratio_vs_mcp.map_or("-".into(), |r| format!("{r:.4}"))
        );
    }
    Ok(exit_code::OK)
}

fn cmd_export(a: ExportArgs) -> Result<i32, CliError> {
    let s = load_targeted(&a.target)?;
    let g = build_extended_graph(&s, &a.target.app, a.target.mode)?;
    let dot = match a.gamma {
        None => g.to_dot(),
        Some(gamma) => {
            let app = s.application(&a.target.app)?;
            build_feasible_graph(&g, app, gamma)?.to_dot()
        }
    };
    write_file(&a.out, dot.as_bytes())?;
    Ok(exit_code::OK)
}

fn opt_cell<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

/// Writes rows under [`CSV_HEADER`].
pub fn write_csv<W: Write>(rows: &[RunRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let b = r.blocks;
        w.write_record([
            r.algorithm.as_str().to_string(),
            r.app.clone(),
            opt_cell(r.gamma),
            opt_cell(r.lambda),
            r.axis.clone(),
            r.value.to_string(),
            r.feasible.to_string(),
            opt_cell(r.exit),
            opt_cell(r.latency_ms),
            opt_cell(r.accuracy_pct),
            opt_cell(r.total_mj),
            opt_cell(r.comm_mj),
            opt_cell(r.compute_mj),
            opt_cell(b.map(|b| b[0])),
            opt_cell(b.map(|b| b[1])),
            opt_cell(b.map(|b| b[2])),
            r.wall_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn emit_csv(rows: &[RunRow], out: Option<&Path>) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    match out {
        Some(path) => write_file(path, &buf),
        None => io::stdout().write_all(&buf).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

/// Reads rows written by [`write_csv`].
pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<RunRow>, String> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
    if header != CSV_HEADER {
        return Err(format!("unexpected header {header:?}"));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let cell = |i: usize| rec.get(i).unwrap_or("");
        fn opt<T: std::str::FromStr>(s: &str) -> Result<Option<T>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| format!("bad cell {s:?}"))
            }
        }
        fn req<T: std::str::FromStr>(s: &str) -> Result<T, String> {
            s.parse().map_err(|_| format!("bad cell {s:?}"))
        }
        let algorithm = <Algorithm as clap::ValueEnum>::from_str(cell(0), false)?;
        let blocks = match (opt(cell(13))?, opt(cell(14))?, opt(cell(15))?) {
            (Some(m), Some(e), Some(c)) => Some([m, e, c]),
            _ => None,
        };
        rows.push(RunRow {
            algorithm,
            app: cell(1).to_string(),
            gamma: opt(cell(2))?,
            lambda: opt(cell(3))?,
            axis: cell(4).to_string(),
            value: req(cell(5))?,
            feasible: req(cell(6))?,
            exit: opt(cell(7))?,
            latency_ms: opt(cell(8))?,
            accuracy_pct: opt(cell(9))?,
            total_mj: opt(cell(10))?,
            comm_mj: opt(cell(11))?,
            compute_mj: opt(cell(12))?,
            blocks,
            wall_ms: req(cell(16))?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_conventions() {
        assert_eq!(parse_delta("5").unwrap(), 5e-3);
        assert_eq!(parse_delta("5ms").unwrap(), 5e-3);
        assert_eq!(parse_delta("0.1 s").unwrap(), 0.1);
        assert!(parse_delta("0").is_err());
        assert_eq!(parse_alpha("0.8").unwrap(), 0.8);
        assert_eq!(parse_alpha("80%").unwrap(), 0.8);
        assert!(parse_alpha("80").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
