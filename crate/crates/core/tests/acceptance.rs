//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any hard failure.

mod common;

use common::{desk_instance, enumerate_paths, hosts, naive_energy, APP};
use fin_core::config::{Algorithm, Configuration};
use fin_core::evaluation::{evaluate, run_multi_app, solve, Outcome, SolveParams};
use fin_core::feasible::build_feasible_graph;
use fin_core::graph::{build_extended_graph, TraversalMode};
use fin_core::scenario::Scenario;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::{Command, ExitCode};
use std::time::Instant;

const DESK_INSTANCES: usize = 100;
const MAX_SEEDS: u64 = 5_000;
const PAPER_TOLERANCE: f64 = 0.25;
const CONVERGENCE_GAMMA: usize = 1000;
const CONVERGENCE_SLACK: f64 = 0.002;
const CONVERGENCE_RTOL: f64 = 1e-9;
const PATH_LIMIT: usize = 10_000;

struct Verdict {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn params(gamma: usize) -> SolveParams {
    SolveParams {
        gamma,
        lambda: None,
        mode: TraversalMode::Survival,
        opt_guard: 1e8,
        timing: false,
    }
}

fn energy(o: &Outcome) -> Option<f64> {
    o.solution.as_ref().map(|s| s.energy)
}

/// Desk instances on which Opt finds a feasible configuration.
fn opt_feasible_instances(n: usize) -> Vec<(Scenario, Outcome)> {
    let mut out = Vec::new();
    for seed in 0..MAX_SEEDS {
        if out.len() == n {
            break;
        }
        let s = desk_instance(seed);
        let opt = solve(&s, APP, Algorithm::Opt, &params(1)).unwrap();
        if opt.feasible() {
            out.push((s, opt));
        }
    }
    out
}

fn competitive_ratio(instances: &[(Scenario, Outcome)]) -> Verdict {
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut unexplained = 0;
    let mut details = Vec::new();
    for gamma in [3, 10, 50] {
        let (mut solved, mut unsolved, mut worst) = (0, 0, 1.0f64);
        for (i, (s, opt)) in instances.iter().enumerate() {
            let fin = solve(s, APP, Algorithm::FinExact, &params(gamma)).unwrap();
            let (Some(f), Some(o)) = (energy(&fin), energy(opt)) else {
                unsolved += 1;
                continue;
            };
            solved += 1;
            if o > 0.0 {
                worst = worst.max(f / o);
            }
            if f > (1.0 + 1.0 / gamma as f64) * o {
                violations.push(format!("γ={gamma} instance {i}: ratio {:.6}", f / o));
                // every path whose latency leaves one quantum per hop of headroom
                // survives the rounding, so FIN can do no worse than Opt on that budget
                let app = s.application(APP).unwrap();
                let hops = app.num_blocks() as f64;
                let shrunk = app.target_latency * (1.0 - hops / gamma as f64);
                if shrunk > 0.0 {
                    let tight = s.with_application(app.with_targets(None, Some(shrunk))).unwrap();
                    let o_tight = energy(&solve(&tight, APP, Algorithm::Opt, &params(1)).unwrap());
                    if o_tight.is_some_and(|ot| f > ot) {
                        unexplained += 1;
                    }
                }
            }
        }
        details.push(format!("γ={gamma}: {solved} solved, {unsolved} without FIN path, worst ratio {worst:.6}"));
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = violations.is_empty() && secs < 60.0 && instances.len() >= DESK_INSTANCES;
    Verdict {
        id: 1,
        name: "competitive ratio",
        pass,
        detail: format!(
            "{} instances, {} violations ({unexplained} not explained by latency quantization), {secs:.2} s; {}{}",
            instances.len(),
            violations.len(),
            details.join("; "),
            if violations.is_empty() {
                String::new()
            } else {
                format!("; first: {}", violations[..violations.len().min(3)].join(", "))
            }
        ),
    }
}

fn feasible_graph_soundness() -> Verdict {
    let (mut graphs, mut paths, mut violations) = (0, 0, 0);
    for seed in 0..300 {
        let s = desk_instance(seed);
        let app = s.application(APP).unwrap();
        let g = build_extended_graph(&s, APP, TraversalMode::Survival).unwrap();
        for gamma in [3, 10, 50] {
            let fg = build_feasible_graph(&g, app, gamma).unwrap();
            let Some(all) = enumerate_paths(&fg, PATH_LIMIT) else { continue };
            graphs += 1;
            for p in all {
                paths += 1;
                let base = fg.base_path(&p);
                let nodes: Vec<&str> = base[1..].iter().map(|&v| g.vertices[v].node.as_str()).collect();
                let exit = g.exit_at(*base.last().unwrap()).unwrap().index;
                let cfg = Configuration::from_nodes(APP, &nodes, exit, Algorithm::Manual);
                let r = evaluate(&s, APP, &cfg, TraversalMode::Survival).unwrap();
                if !(r.feasible && r.latency <= app.target_latency) {
                    violations += 1;
                }
            }
        }
    }
    Verdict {
        id: 2,
        name: "feasible-graph soundness",
        pass: violations == 0 && paths > 0,
        detail: format!("{graphs} feasible graphs, {paths} source-to-terminal paths enumerated, {violations} violations"),
    }
}

fn oracle_convergence(instances: &[(Scenario, Outcome)]) -> Verdict {
    let (mut eligible, mut mismatches, mut worst) = (0, Vec::new(), 0.0f64);
    for (i, (s, opt)) in instances.iter().enumerate() {
        let report = opt.report.as_ref().unwrap();
        let delta = s.application(APP).unwrap().target_latency;
        if report.latency > (1.0 - CONVERGENCE_SLACK) * delta {
            continue;
        }
        eligible += 1;
        let fin = solve(s, APP, Algorithm::FinExact, &params(CONVERGENCE_GAMMA)).unwrap();
        let o = energy(opt).unwrap();
        match energy(&fin) {
            Some(f) => {
                let rel = (f - o).abs() / o.abs().max(f64::MIN_POSITIVE);
                worst = worst.max(rel);
                if rel > CONVERGENCE_RTOL {
                    mismatches.push(format!("instance {i}: rel {rel:.3e}"));
                }
            }
            None => mismatches.push(format!("instance {i}: no FIN path")),
        }
    }
    Verdict {
        id: 3,
        name: "oracle convergence (γ=1000)",
        pass: mismatches.is_empty() && eligible > 0,
        detail: format!(
            "{eligible} instances with ≥{:.1}% latency slack, {} mismatches, worst rel {worst:.3e}{}",
            CONVERGENCE_SLACK * 100.0,
            mismatches.len(),
            if mismatches.is_empty() {
                String::new()
            } else {
                format!("; {}", mismatches[..mismatches.len().min(3)].join(", "))
            }
        ),
    }
}

fn deviation(value: f64, target: f64) -> f64 {
    (value - target) / target
}

fn paper_figures() -> Verdict {
    let s = common::load("b_alexnet_cifar10.json");
    let h = "alexnet_cifar10";
    let all = Configuration::from_nodes(h, &["mobile"; 5], 3, Algorithm::Manual);
    let first = Configuration::from_nodes(h, &["mobile"], 1, Algorithm::Manual);
    let ra = evaluate(&s, h, &all, TraversalMode::Survival).unwrap();
    let r1 = evaluate(&s, h, &first, TraversalMode::Survival).unwrap();
    let figures = [
        ("latency all exits", ra.latency * 1e3, 6.56, "ms"),
        ("latency exit-1", r1.latency * 1e3, 2.67, "ms"),
        ("energy all exits", ra.energy_per_inference * 1e3, 39.4, "mJ"),
        ("energy exit-1", r1.energy_per_inference * 1e3, 16.4, "mJ"),
    ];
    let soft = figures
        .iter()
        .all(|(_, v, t, _)| deviation(*v, *t).abs() <= PAPER_TOLERANCE);
    let ordering = r1.latency < ra.latency && r1.energy_per_inference < ra.energy_per_inference;
    let listed: Vec<String> = figures
        .iter()
        .map(|(n, v, t, u)| format!("{n} {v:.4e} {u} (paper {t}, {:+.1}%)", deviation(*v, *t) * 100.0))
        .collect();
    Verdict {
        id: 4,
        name: "paper figures (soft) / ordering (hard)",
        pass: soft || ordering,
        detail: format!(
            "soft ±{:.0}%: {}; ordering exit-1 faster and cheaper: {}; {}",
            PAPER_TOLERANCE * 100.0,
            if soft { "within" } else { "OUTSIDE" },
            ordering,
            listed.join(", ")
        ),
    }
}

fn deployment_sets() -> Verdict {
    let base = common::load("b_alexnet_cifar10.json");
    let h = "alexnet_cifar10";
    let run = |delta: f64| -> Vec<(Algorithm, Outcome)> {
        let app = base.application(h).unwrap().with_targets(Some(0.8), Some(delta));
        let s = base.with_application(app).unwrap();
        [Algorithm::Mcp, Algorithm::FinExact, Algorithm::Opt]
            .into_iter()
            .map(|a| (a, solve(&s, h, a, &params(10)).unwrap()))
            .collect()
    };
    let split = |o: &Outcome| o.report.as_ref().map(|r| r.split());
    let describe = |rs: &[(Algorithm, Outcome)]| -> String {
        rs.iter()
            .map(|(a, o)| match &o.report {
                Some(r) => format!(
                    "{a} {:?} exit-{} {:.4e} J/s{}",
                    r.split(),
                    r.exit,
                    r.total_energy,
                    if r.feasible { "" } else { " (infeasible)" }
                ),
                None => format!("{a} none"),
            })
            .collect::<Vec<_>>()
            .join(", ")
    };
    let r5 = run(5e-3);
    let r12 = run(12e-3);
    let expect5 = [[3, 1, 1], [2, 1, 2], [1, 2, 2]];
    let expect12 = [[1, 4, 0], [5, 0, 0], [5, 0, 0]];
    let exact = r5.iter().zip(expect5).all(|((_, o), e)| split(o) == Some(e))
        && r12.iter().zip(expect12).all(|((_, o), e)| split(o) == Some(e))
        && r5.iter().all(|(_, o)| o.report.as_ref().is_some_and(|r| r.exit == 3));

    let e = |rs: &[(Algorithm, Outcome)], i: usize| energy(&rs[i].1).unwrap_or(f64::INFINITY);
    let ordered = e(&r5, 2) <= e(&r5, 1) && e(&r5, 1) <= e(&r5, 0);
    let exit3 = r5.iter().all(|(_, o)| o.report.as_ref().is_some_and(|r| r.exit == 3));
    let mobile12 = split(&r12[2].1) == Some([5, 0, 0]);
    let fallback = ordered && exit3 && mobile12;
    Verdict {
        id: 5,
        name: "deployment sets (soft) / fallback (hard)",
        pass: exact || fallback,
        detail: format!(
            "exact splits: {exact}; fallback: energy order opt≤fin≤mcp {ordered}, all exit-3 {exit3}, opt all-mobile at 12 ms {mobile12}; δ=5 ms: {}; δ=12 ms: {}",
            describe(&r5),
            describe(&r12)
        ),
    }
}

fn multi_app() -> Verdict {
    let s = common::load("multiapp_default.json");
    let p = params(10);
    let res = run_multi_app(&s, 100, &[Algorithm::FinExact, Algorithm::Mcp], 0, &p).unwrap();
    let fin = res.summary(Algorithm::FinExact).unwrap();
    let mcp = res.summary(Algorithm::Mcp).unwrap();
    let dominance = fin.worse_than_mcp == 0;
    let failures = fin.failure_probability < mcp.failure_probability;
    let ratio_ok = fin.energy_ratio_vs_mcp.is_some_and(|r| (0.6..=0.8).contains(&r));
    let per_app: Vec<String> = fin
        .per_app
        .iter()
        .map(|(a, f)| {
            format!(
                "{a} fin {:.0}%/mcp {:.0}%",
                f.failure_probability * 100.0,
                mcp.per_app[a].failure_probability * 100.0
            )
        })
        .collect();
    Verdict {
        id: 6,
        name: "multi-app dominance",
        pass: dominance && failures,
        detail: format!(
            "fin worse than mcp on {} paired runs (hard); failure fin {:.2}% < mcp {:.2}%: {failures} (hard); energy ratio {} in [0.6, 0.8]: {ratio_ok} (soft); {}",
            fin.worse_than_mcp,
            fin.failure_probability * 100.0,
            mcp.failure_probability * 100.0,
            fin.energy_ratio_vs_mcp.map_or("n/a (no run feasible for both)".into(), |r| format!("{r:.4}")),
            per_app.join(", ")
        ),
    }
}

fn evaluation_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut checked, mut mismatches) = (0, 0);
    let mut seed = 0;
    while checked < 1000 {
        let s = desk_instance(seed);
        seed += 1;
        let app = s.application(APP).unwrap();
        let exits: Vec<(usize, usize)> = app.exits().map(|(b, e)| (b.index, e.index)).collect();
        let hs = hosts(&s);
        for _ in 0..10 {
            let (block, exit) = exits[rng.random_range(0..exits.len())];
            let nodes: Vec<&str> = (0..block).map(|_| hs[rng.random_range(0..hs.len())].as_str()).collect();
            let cfg = Configuration::from_nodes(APP, &nodes, exit, Algorithm::Manual);
            for mode in [TraversalMode::Survival, TraversalMode::Literal] {
                let r = evaluate(&s, APP, &cfg, mode).unwrap();
                let (comm, comp, total) = naive_energy(&s, APP, &nodes, mode);
                let same = r.comm_energy.to_bits() == comm.to_bits()
                    && r.compute_energy.to_bits() == comp.to_bits()
                    && r.total_energy.to_bits() == total.to_bits();
                if !same {
                    mismatches += 1;
                }
            }
            checked += 1;
        }
    }
    Verdict {
        id: 7,
        name: "evaluation-oracle equivalence",
        pass: mismatches == 0,
        detail: format!("{checked} random configurations × 2 modes, {mismatches} bit-level mismatches"),
    }
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_fin");
    let profile = common::data("b_alexnet_cifar10.json");
    let multi = common::data("multiapp_default.json");
    let runs: Vec<(&str, Vec<String>)> = vec![
        (
            "sweep",
            vec![
                "sweep".into(),
                "--scenario".into(),
                profile.display().to_string(),
                "--app".into(),
                "alexnet_cifar10".into(),
                "--axis".into(),
                "delta".into(),
                "--values".into(),
                "2,5,6,12".into(),
                "--alpha".into(),
                "80%".into(),
            ],
        ),
        (
            "multiapp",
            vec![
                "multiapp".into(),
                "--scenario".into(),
                multi.display().to_string(),
                "--users".into(),
                "20".into(),
                "--seed".into(),
                "42".into(),
            ],
        ),
        (
            "solve",
            vec![
                "solve".into(),
                "--scenario".into(),
                profile.display().to_string(),
                "--app".into(),
                "alexnet_cifar10".into(),
                "--algo".into(),
                "fin-greedy".into(),
                "--gamma".into(),
                "10".into(),
                "--lambda".into(),
                "4".into(),
            ],
        ),
    ];
    let mut identical = 0;
    let mut differing = Vec::new();
    for (name, args) in &runs {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("{name}{rep}.out"));
            let status = Command::new(bin)
                .args(args)
                .arg("--out")
                .arg(&out)
                .output()
                .unwrap();
            let mut bytes = std::fs::read(&out).unwrap_or_default();
            let summary = dir.path().join(format!("{name}{rep}.out.summary.json"));
            bytes.extend(std::fs::read(summary).unwrap_or_default());
            outputs.push((status.status.code(), bytes));
        }
        if outputs[0] == outputs[1] && !outputs[0].1.is_empty() {
            identical += 1;
        } else {
            differing.push(*name);
        }
    }
    Verdict {
        id: 8,
        name: "determinism",
        pass: differing.is_empty(),
        detail: format!("{identical}/{} commands byte-identical across repeated runs {:?}", runs.len(), differing),
    }
}

fn main() -> ExitCode {
    let instances = opt_feasible_instances(DESK_INSTANCES);
    let verdicts = vec![
        competitive_ratio(&instances),
        feasible_graph_soundness(),
        oracle_convergence(&instances),
        paper_figures(),
        deployment_sets(),
        multi_app(),
        evaluation_oracle(),
        determinism(),
    ];
    println!();
    for v in &verdicts {
        println!(
            "{} criterion {}: {} — {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.id,
            v.name,
            v.detail
        );
    }
    let failed: Vec<u32> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    println!();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", verdicts.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: criteria {failed:?} fail");
        ExitCode::FAILURE
    }
}
