//! Seeded random desk instances and independent reference computations.
#![allow(dead_code)]

use fin_core::scenario::{
    Application, DnnBlock, DnnModel, EarlyExit, Link, NetworkNode, Scenario, SliceShare, SliceTarget, Tier,
};
use fin_core::TraversalMode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

pub const APP: &str = "app";
pub const SOURCE: &str = "src";

pub fn data(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(file)
}

pub fn load(file: &str) -> Scenario {
    Scenario::load(data(file)).unwrap()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.random_range(lo..hi))
}

/// A random instance with 3–6 nodes (one of them the data source) and 3–8 blocks.
///
/// The latency target is drawn around the all-on-first-node latency so that
/// it binds on a good share of instances.
pub fn desk_instance(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_compute = rng.random_range(2..=5);
    let n_blocks = rng.random_range(3..=8);

    let mut nodes = vec![NetworkNode {
        id: SOURCE.into(),
        tier: Tier::Source,
        compute_capacity: 0.0,
        compute_power: 0.0,
        idle_power: 0.0,
        max_power: 0.0,
        uplink_capacity: f64::INFINITY,
        downlink_capacity: f64::INFINITY,
        tx_energy_per_bit: 0.0,
        rx_energy_per_bit: 0.0,
    }];
    for i in 0..n_compute {
        let tier = match (i, rng.random_range(0..3)) {
            (0, _) | (_, 0) => Tier::Mobile,
            (_, 1) => Tier::Edge,
            _ => Tier::Cloud,
        };
        let bw = |rng: &mut ChaCha8Rng| {
            if rng.random_bool(0.2) {
                f64::INFINITY
            } else {
                log_uniform(rng, 7.0, 9.5)
            }
        };
        nodes.push(NetworkNode {
            id: format!("n{i}"),
            tier,
            compute_capacity: log_uniform(&mut rng, 9.0, 11.5),
            compute_power: rng.random_range(1.0..200.0),
            idle_power: 0.0,
            max_power: 0.0,
            uplink_capacity: bw(&mut rng),
            downlink_capacity: bw(&mut rng),
            tx_energy_per_bit: rng.random_range(1.0..50.0) * 1e-9,
            rx_energy_per_bit: rng.random_range(1.0..50.0) * 1e-9,
        });
    }

    let mut links = vec![Link {
        from: SOURCE.into(),
        to: "n0".into(),
        bandwidth: f64::INFINITY,
    }];
    for a in 0..n_compute {
        for b in 0..n_compute {
            if a != b && rng.random_bool(0.75) {
                let bandwidth = if rng.random_bool(0.5) {
                    f64::INFINITY
                } else {
                    log_uniform(&mut rng, 7.0, 9.5)
                };
                links.push(Link {
                    from: format!("n{a}"),
                    to: format!("n{b}"),
                    bandwidth,
                });
            }
        }
    }

    let mut has_exit: Vec<bool> = (0..n_blocks).map(|_| rng.random_bool(0.4)).collect();
    has_exit[n_blocks - 1] = true;
    let n_exits = has_exit.iter().filter(|&&e| e).count();
    let mut accuracies: Vec<f64> = (0..n_exits).map(|_| rng.random_range(0.3..0.99)).collect();
    accuracies.sort_by(f64::total_cmp);
    let weights: Vec<f64> = (0..n_exits).map(|_| rng.random_range(0.05..1.0)).collect();
    let wsum: f64 = weights.iter().sum();
    let mut fractions: Vec<f64> = weights.iter().map(|w| w / wsum).collect();
    let earlier: f64 = fractions[..n_exits - 1].iter().sum();
    fractions[n_exits - 1] = 1.0 - earlier;

    let mut blocks = Vec::with_capacity(n_blocks);
    let mut k = 0;
    for (i, &exit) in has_exit.iter().enumerate() {
        let exit = exit.then(|| {
            k += 1;
            EarlyExit {
                index: k,
                ops: log_uniform(&mut rng, 5.0, 7.5),
                fraction: fractions[k - 1],
                accuracy: accuracies[k - 1],
                features: 10.0,
            }
        });
        blocks.push(DnnBlock {
            index: i + 1,
            features: rng.random_range(100..20_000) as f64,
            ops: log_uniform(&mut rng, 6.0, 8.5),
            exit,
        });
    }

    let alpha = accuracies[rng.random_range(0..n_exits)];
    let mut app = Application {
        id: APP.into(),
        source_node: SOURCE.into(),
        inference_rate: rng.random_range(1.0..50.0),
        target_accuracy: alpha,
        target_latency: 1.0,
        bits_per_feature: [8.0, 16.0, 32.0][rng.random_range(0..3)],
        model: DnnModel {
            name: "desk".into(),
            input_features: rng.random_range(100..5_000) as f64,
            blocks,
        },
    };

    let mut slices = Vec::new();
    for n in nodes.iter().skip(1) {
        if rng.random_bool(0.3) {
            slices.push(SliceShare {
                app: APP.into(),
                target: SliceTarget::Node(n.id.clone()),
                compute_fraction: Some(rng.random_range(0.2..1.0)),
                bandwidth_fraction: Some(rng.random_range(0.2..1.0)),
            });
        }
    }

    let mut s = Scenario {
        nodes,
        links,
        slices,
        applications: vec![app.clone()],
    };
    // latency of running everything on the first node, up to the target exit
    let last = app
        .model
        .blocks
        .iter()
        .position(|b| b.exit.as_ref().is_some_and(|e| e.accuracy >= alpha))
        .unwrap()
        + 1;
    let c0 = s.effective_compute(APP, "n0").unwrap();
    let local: f64 = app.model.blocks[..last].iter().map(|b| b.total_ops() / c0).sum();
    app.target_latency = local * rng.random_range(0.2..1.5);
    s.applications[0] = app;
    s.validate().unwrap();
    s
}

/// Compute-capable node ids of `s`.
pub fn hosts(s: &Scenario) -> Vec<String> {
    s.nodes
        .iter()
        .filter(|n| n.compute_capacity > 0.0)
        .map(|n| n.id.clone())
        .collect()
}

/// Naive restatement of the objective: `(comm, compute, total)` in J/s.
///
/// Written out independently of the library's accumulation helpers; the
/// order of floating-point operations follows the documented definition
/// (per-hop weighted terms summed left to right, then scaled by the rate).
pub fn naive_energy(s: &Scenario, h: &str, nodes: &[&str], mode: TraversalMode) -> (f64, f64, f64) {
    let app = s.applications.iter().find(|a| a.id == h).unwrap();
    let node = |id: &str| s.nodes.iter().find(|n| n.id == id).unwrap();
    let blocks = &app.model.blocks;
    let last_exit = blocks.iter().rposition(|b| b.exit.is_some()).unwrap() + 1;
    let mut comm_sum = 0.0;
    let mut comp_sum = 0.0;
    let mut prev = node(&app.source_node);
    for (i, id) in nodes.iter().enumerate() {
        let block = i + 1;
        let tail = block - 1;
        let tau = match mode {
            TraversalMode::Survival => {
                if tail >= last_exit {
                    0.0
                } else {
                    let mut exited = 0.0;
                    for b in &blocks[..tail] {
                        if let Some(e) = &b.exit {
                            exited += e.fraction;
                        }
                    }
                    f64::max(1.0 - exited, 0.0)
                }
            }
            TraversalMode::Literal => {
                if tail == 0 {
                    1.0
                } else {
                    blocks[tail - 1].exit.as_ref().map_or(0.0, |e| e.fraction)
                }
            }
        };
        let cur = node(id);
        let features = if tail == 0 {
            app.model.input_features
        } else {
            blocks[tail - 1].features
        };
        let bits = features * app.bits_per_feature;
        let b = &blocks[block - 1];
        let ops = b.ops + b.exit.as_ref().map_or(0.0, |e| e.ops);
        let comm = if prev.id == cur.id || prev.tier == Tier::Source {
            0.0
        } else {
            (prev.tx_energy_per_bit + cur.rx_energy_per_bit) * bits
        };
        let per_op = if cur.compute_capacity > 0.0 {
            cur.compute_power / cur.compute_capacity
        } else {
            0.0
        };
        comm_sum += tau * comm;
        comp_sum += tau * (per_op * ops);
        prev = cur;
    }
    let comm = app.inference_rate * comm_sum;
    let comp = app.inference_rate * comp_sum;
    (comm, comp, comm + comp)
}

/// Every replica path from a source to a terminal, or `None` above `limit`.
pub fn enumerate_paths(fg: &fin_core::FeasibleGraph, limit: usize) -> Option<Vec<Vec<usize>>> {
    // count first so huge graphs are skipped cheaply
    let n = fg.vertices.len();
    let mut count = vec![0u128; n];
    for &t in &fg.terminals {
        count[t] = 1;
    }
    for v in (0..n).rev() {
        for &e in &fg.adjacency[v] {
            count[v] += count[fg.edges[e].to];
        }
    }
    // terminals may continue to deeper exits, which the counts above already include
    let total: u128 = fg.sources.iter().map(|&s| count[s]).sum();
    if total > limit as u128 {
        return None;
    }
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for &s in &fg.sources {
        walk(fg, s, &mut stack, &mut out);
    }
    Some(out)
}

fn walk(fg: &fin_core::FeasibleGraph, v: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    stack.push(v);
    if fg.terminals.contains(&v) {
        out.push(stack.clone());
    }
    for &e in &fg.adjacency[v] {
        walk(fg, fg.edges[e].to, stack, out);
    }
    stack.pop();
}
