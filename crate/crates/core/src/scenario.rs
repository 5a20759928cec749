//! Multi-tier system and application model.
//!
//! A [`Scenario`] bundles the network nodes (sources, mobiles, edge and
//! cloud servers), the links between them, per-application resource slices
//! and the early-exit DNN applications to deploy. All quantities are stored
//! in base SI units; scenario files may use unit suffixes (see [`crate::units`]).
//!
//! Scenario files are JSON with top-level keys `nodes`, `links`, `slices`,
//! `applications` and an optional `include` list of other scenario files
//! (paths relative to the including file) whose contents are merged first.

use crate::units::{serialize_f64, Dimension, RawQuantity, UnitError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Default tensor quantization width when an application does not set one.
pub const DEFAULT_BITS_PER_FEATURE: f64 = 32.0;

/// Slack allowed when checking that slice fractions sum to at most one.
const SLICE_SUM_TOLERANCE: f64 = 1e-9;

/// Slack allowed between a declared final-exit fraction and the remainder.
const EXIT_FRACTION_TOLERANCE: f64 = 1e-3;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{context}: {source}")]
    Unit {
        context: String,
        #[source]
        source: UnitError,
    },
    #[error("invalid scenario ({invariant}) at `{id}`")]
    Validation { invariant: String, id: String },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown application `{0}`")]
    UnknownApplication(String),
    #[error("block index {index} out of range 1..={len}")]
    BlockOutOfRange { index: usize, len: usize },
}

impl ScenarioError {
    fn invalid(invariant: impl Into<String>, id: impl Into<String>) -> Self {
        ScenarioError::Validation {
            invariant: invariant.into(),
            id: id.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Source,
    Mobile,
    Edge,
    Cloud,
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Source => "source",
            Tier::Mobile => "mobile",
            Tier::Edge => "edge",
            Tier::Cloud => "cloud",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkNode {
    pub id: String,
    pub tier: Tier,
    /// operations per second
    pub compute_capacity: f64,
    /// watts drawn while computing at full capacity
    pub compute_power: f64,
    pub idle_power: f64,
    pub max_power: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub uplink_capacity: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub downlink_capacity: f64,
    pub tx_energy_per_bit: f64,
    pub rx_energy_per_bit: f64,
}

impl NetworkNode {
    /// Joules per operation; zero for nodes without compute.
    pub fn energy_per_op(&self) -> f64 {
        if self.compute_capacity > 0.0 {
            self.compute_power / self.compute_capacity
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Link {
    pub from: String,
    pub to: String,
    #[serde(serialize_with = "serialize_f64")]
    pub bandwidth: f64,
}

/// What a slice applies to: a node's compute/interfaces or a single link.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceTarget {
    Node(String),
    Link(String, String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceShare {
    pub app: String,
    #[serde(flatten)]
    pub target: SliceTarget,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compute_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EarlyExit {
    pub index: usize,
    pub ops: f64,
    pub fraction: f64,
    pub accuracy: f64,
    pub features: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DnnBlock {
    /// 1-based position in the backbone
    pub index: usize,
    /// features in the tensor handed to the next block
    pub features: f64,
    pub ops: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exit: Option<EarlyExit>,
}

impl DnnBlock {
    /// Backbone plus exit operations; every exit placed on a node is executed.
    pub fn total_ops(&self) -> f64 {
        self.ops + self.exit.as_ref().map_or(0.0, |e| e.ops)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DnnModel {
    pub name: String,
    /// features of the raw input fed from the source to block 1
    pub input_features: f64,
    pub blocks: Vec<DnnBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Application {
    pub id: String,
    pub source_node: String,
    /// inferences per second
    pub inference_rate: f64,
    pub target_accuracy: f64,
    /// seconds
    pub target_latency: f64,
    pub bits_per_feature: f64,
    pub model: DnnModel,
}

impl Application {
    pub fn num_blocks(&self) -> usize {
        self.model.blocks.len()
    }

    pub fn block(&self, index: usize) -> Result<&DnnBlock, ScenarioError> {
        index
            .checked_sub(1)
            .and_then(|i| self.model.blocks.get(i))
            .ok_or(ScenarioError::BlockOutOfRange {
                index,
                len: self.num_blocks(),
            })
    }

    /// Bits handed from block `index` to block `index + 1`; index 0 is the raw input.
    pub fn output_bits(&self, index: usize) -> Result<f64, ScenarioError> {
        let features = if index == 0 {
            self.model.input_features
        } else {
            self.block(index)?.features
        };
        Ok(features * self.bits_per_feature)
    }

    /// Fraction of input samples still in flight after block `index`.
    pub fn survival_fraction(&self, index: usize) -> Result<f64, ScenarioError> {
        if index > self.num_blocks() {
            return Err(ScenarioError::BlockOutOfRange {
                index,
                len: self.num_blocks(),
            });
        }
        if index >= self.last_exit_block() {
            return Ok(0.0);
        }
        let exited: f64 = self.model.blocks[..index]
            .iter()
            .filter_map(|b| b.exit.as_ref())
            .map(|e| e.fraction)
            .sum();
        Ok((1.0 - exited).max(0.0))
    }

    /// Fraction of samples output by the exit of block `index` (0 without exit).
    pub fn exit_fraction(&self, index: usize) -> Result<f64, ScenarioError> {
        Ok(self.block(index)?.exit.as_ref().map_or(0.0, |e| e.fraction))
    }

    fn last_exit_block(&self) -> usize {
        self.model
            .blocks
            .iter()
            .rev()
            .find(|b| b.exit.is_some())
            .map_or(usize::MAX, |b| b.index)
    }

    /// Blocks that carry an exit, in order.
    pub fn exits(&self) -> impl Iterator<Item = (&DnnBlock, &EarlyExit)> {
        self.model
            .blocks
            .iter()
            .filter_map(|b| b.exit.as_ref().map(|e| (b, e)))
    }

    /// Block hosting exit number `exit_index`.
    pub fn exit_block(&self, exit_index: usize) -> Option<usize> {
        self.exits()
            .find(|(_, e)| e.index == exit_index)
            .map(|(b, _)| b.index)
    }

    /// Copy with replaced latency/accuracy targets.
    pub fn with_targets(&self, accuracy: Option<f64>, latency: Option<f64>) -> Application {
        let mut app = self.clone();
        if let Some(a) = accuracy {
            app.target_accuracy = a;
        }
        if let Some(d) = latency {
            app.target_latency = d;
        }
        app
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Scenario {
    pub nodes: Vec<NetworkNode>,
    pub links: Vec<Link>,
    pub slices: Vec<SliceShare>,
    pub applications: Vec<Application>,
}

impl Scenario {
    pub fn node(&self, id: &str) -> Result<&NetworkNode, ScenarioError> {
        self.nodes
            .iter()
            .find(|n| n.id == id)
            .ok_or_else(|| ScenarioError::UnknownNode(id.to_string()))
    }

    pub fn application(&self, id: &str) -> Result<&Application, ScenarioError> {
        self.applications
            .iter()
            .find(|a| a.id == id)
            .ok_or_else(|| ScenarioError::UnknownApplication(id.to_string()))
    }

    pub fn link(&self, from: &str, to: &str) -> Option<&Link> {
        self.links.iter().find(|l| l.from == from && l.to == to)
    }

    /// Replaces application `app.id` with `app`; used for target overrides.
    pub fn with_application(&self, app: Application) -> Result<Scenario, ScenarioError> {
        let mut s = self.clone();
        let slot = s
            .applications
            .iter_mut()
            .find(|a| a.id == app.id)
            .ok_or_else(|| ScenarioError::UnknownApplication(app.id.clone()))?;
        *slot = app;
        Ok(s)
    }

    fn slice(&self, app: &str, target: &SliceTarget) -> Option<&SliceShare> {
        self.slices
            .iter()
            .find(|s| s.app == app && &s.target == target)
    }

    fn node_bandwidth_fraction(&self, app: &str, node: &str) -> f64 {
        self.slice(app, &SliceTarget::Node(node.to_string()))
            .and_then(|s| s.bandwidth_fraction)
            .unwrap_or(1.0)
    }

    /// Compute share of `app` on `node`; undeclared shares default to the whole node.
    pub fn compute_fraction(&self, app: &str, node: &str) -> f64 {
        self.slice(app, &SliceTarget::Node(node.to_string()))
            .and_then(|s| s.compute_fraction)
            .unwrap_or(1.0)
    }

    /// Bandwidth b^h(n1, n2) available to application `app` from `n1` to `n2`.
    ///
    /// Infinite on self loops and on links leaving a (co-located) data source.
    /// Otherwise each resource on the way is sliced on its own: the sender
    /// uplink, the receiver downlink and the link itself, and the minimum of
    /// the three sliced capacities is returned. Zero when no link is declared.
    pub fn effective_bandwidth(&self, app: &str, n1: &str, n2: &str) -> Result<f64, ScenarioError> {
        self.application(app)?;
        let sender = self.node(n1)?;
        let receiver = self.node(n2)?;
        if n1 == n2 {
            return Ok(f64::INFINITY);
        }
        let Some(link) = self.link(n1, n2) else {
            return Ok(0.0);
        };
        let link_fraction = self
            .slice(app, &SliceTarget::Link(n1.to_string(), n2.to_string()))
            .and_then(|s| s.bandwidth_fraction)
            .unwrap_or(1.0);
        let link_share = scaled(link.bandwidth, link_fraction);
        if sender.tier == Tier::Source {
            return Ok(link_share);
        }
        let up = scaled(sender.uplink_capacity, self.node_bandwidth_fraction(app, n1));
        let down = scaled(
            receiver.downlink_capacity,
            self.node_bandwidth_fraction(app, n2),
        );
        Ok(up.min(down).min(link_share))
    }

    /// Compute power c^h(n) of `node` reserved for application `app`, in ops/s.
    pub fn effective_compute(&self, app: &str, node: &str) -> Result<f64, ScenarioError> {
        self.application(app)?;
        let n = self.node(node)?;
        Ok(n.compute_capacity * self.compute_fraction(app, node))
    }

    /// Loads, merges includes, normalizes units and validates.
    pub fn load(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
        let mut stack = Vec::new();
        let raw = load_raw(path.as_ref(), &mut stack)?;
        let scenario = raw.resolve()?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Parses scenario JSON text; `include` entries resolve against `base_dir`.
    pub fn from_json_str(text: &str, base_dir: &Path) -> Result<Scenario, ScenarioError> {
        let origin = base_dir.join("<inline>");
        let file: RawScenario = serde_json::from_str(text).map_err(|source| ScenarioError::Parse {
            path: origin.clone(),
            source,
        })?;
        let mut stack = vec![origin];
        let raw = merge_includes(file, base_dir, &mut stack)?;
        let scenario = raw.resolve()?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Checks every structural invariant; the first violation is reported.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let mut ids = BTreeMap::new();
        for node in &self.nodes {
            if ids.insert(node.id.as_str(), node.tier).is_some() {
                return Err(ScenarioError::invalid("duplicate node id", &node.id));
            }
            let non_negative = [
                node.compute_capacity,
                node.compute_power,
                node.idle_power,
                node.max_power,
                node.uplink_capacity,
                node.downlink_capacity,
                node.tx_energy_per_bit,
                node.rx_energy_per_bit,
            ];
            if non_negative.iter().any(|v| v.is_nan() || *v < 0.0) {
                return Err(ScenarioError::invalid(
                    "node quantities must be non-negative",
                    &node.id,
                ));
            }
            if !node.compute_capacity.is_finite() {
                return Err(ScenarioError::invalid("compute capacity must be finite", &node.id));
            }
            if node.tier == Tier::Source && node.compute_capacity != 0.0 {
                return Err(ScenarioError::invalid(
                    "data sources have no compute capacity",
                    &node.id,
                ));
            }
            if node.max_power < node.idle_power {
                return Err(ScenarioError::invalid("max power below idle power", &node.id));
            }
        }

        for link in &self.links {
            let label = format!("{}->{}", link.from, link.to);
            for end in [&link.from, &link.to] {
                if !ids.contains_key(end.as_str()) {
                    return Err(ScenarioError::invalid("link endpoint is not a declared node", label));
                }
            }
            if link.bandwidth.is_nan() || link.bandwidth < 0.0 {
                return Err(ScenarioError::invalid("link bandwidth must be non-negative", label));
            }
            if link.from == link.to && link.bandwidth != f64::INFINITY {
                return Err(ScenarioError::invalid("self loops have infinite bandwidth", label));
            }
            if ids[link.from.as_str()] == Tier::Source && link.bandwidth != f64::INFINITY {
                return Err(ScenarioError::invalid(
                    "links from a co-located data source have infinite bandwidth",
                    label,
                ));
            }
        }

        let mut app_ids = BTreeMap::new();
        for app in &self.applications {
            if app_ids.insert(app.id.as_str(), ()).is_some() {
                return Err(ScenarioError::invalid("duplicate application id", &app.id));
            }
            validate_application(app, &ids)?;
        }

        let mut compute_sums: BTreeMap<&SliceTarget, f64> = BTreeMap::new();
        let mut bandwidth_sums: BTreeMap<&SliceTarget, f64> = BTreeMap::new();
        for slice in &self.slices {
            let label = match &slice.target {
                SliceTarget::Node(n) => format!("{}@{}", slice.app, n),
                SliceTarget::Link(a, b) => format!("{}@{}->{}", slice.app, a, b),
            };
            if !app_ids.contains_key(slice.app.as_str()) {
                return Err(ScenarioError::invalid(
                    "slice references an undeclared application",
                    label,
                ));
            }
            match &slice.target {
                SliceTarget::Node(n) if !ids.contains_key(n.as_str()) => {
                    return Err(ScenarioError::invalid("slice references an undeclared node", label));
                }
                SliceTarget::Link(a, b) if self.link(a, b).is_none() => {
                    return Err(ScenarioError::invalid("slice references an undeclared link", label));
                }
                _ => {}
            }
            for (value, sums) in [
                (slice.compute_fraction, &mut compute_sums),
                (slice.bandwidth_fraction, &mut bandwidth_sums),
            ] {
                if let Some(v) = value {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(ScenarioError::invalid("slice fraction outside [0, 1]", label));
                    }
                    *sums.entry(&slice.target).or_insert(0.0) += v;
                }
            }
        }
        for (target, sum) in compute_sums.iter().chain(bandwidth_sums.iter()) {
            if *sum > 1.0 + SLICE_SUM_TOLERANCE {
                let id = match target {
                    SliceTarget::Node(n) => n.clone(),
                    SliceTarget::Link(a, b) => format!("{a}->{b}"),
                };
                return Err(ScenarioError::invalid("slice fractions sum above 1", id));
            }
        }
        Ok(())
    }
}

fn scaled(capacity: f64, fraction: f64) -> f64 {
    if fraction <= 0.0 {
        0.0
    } else {
        capacity * fraction
    }
}

fn validate_application(app: &Application, nodes: &BTreeMap<&str, Tier>) -> Result<(), ScenarioError> {
    let id = app.id.as_str();
    match nodes.get(app.source_node.as_str()) {
        None => return Err(ScenarioError::invalid("source node is not declared", id)),
        Some(Tier::Mobile | Tier::Source) => {}
        Some(_) => {
            return Err(ScenarioError::invalid(
                "source node must be a mobile node or a data source",
                id,
            ))
        }
    }
    if !(app.inference_rate >= 0.0) || !app.inference_rate.is_finite() {
        return Err(ScenarioError::invalid("inference rate must be non-negative", id));
    }
    if !(app.target_accuracy > 0.0 && app.target_accuracy <= 1.0) {
        return Err(ScenarioError::invalid("target accuracy must lie in (0, 1]", id));
    }
    if !(app.target_latency > 0.0) {
        return Err(ScenarioError::invalid("target latency must be positive", id));
    }
    if !(app.bits_per_feature > 0.0) {
        return Err(ScenarioError::invalid("bits per feature must be positive", id));
    }
    let blocks = &app.model.blocks;
    if blocks.is_empty() {
        return Err(ScenarioError::invalid("model has no blocks", id));
    }
    let mut next_exit = 1;
    for (i, block) in blocks.iter().enumerate() {
        if block.index != i + 1 {
            return Err(ScenarioError::invalid("blocks must be numbered 1..N in order", id));
        }
        if !(block.ops >= 0.0 && block.features >= 0.0) {
            return Err(ScenarioError::invalid("block ops and features must be non-negative", id));
        }
        if let Some(exit) = &block.exit {
            if exit.index != next_exit {
                return Err(ScenarioError::invalid("exits must be numbered 1..K in block order", id));
            }
            next_exit += 1;
            if !(0.0..=1.0).contains(&exit.fraction) || !(0.0..=1.0).contains(&exit.accuracy) {
                return Err(ScenarioError::invalid(
                    "exit fraction and accuracy must lie in [0, 1]",
                    id,
                ));
            }
            if !(exit.ops >= 0.0) {
                return Err(ScenarioError::invalid("exit ops must be non-negative", id));
            }
        }
    }
    if blocks.last().is_some_and(|b| b.exit.is_none()) {
        return Err(ScenarioError::invalid("the last block must carry the final exit", id));
    }
    let total: f64 = app.exits().map(|(_, e)| e.fraction).sum();
    if (total - 1.0).abs() > EXIT_FRACTION_TOLERANCE {
        return Err(ScenarioError::invalid("exit fractions must sum to 1", id));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// File representation
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    include: Vec<String>,
    #[serde(default)]
    nodes: Vec<RawNode>,
    #[serde(default)]
    links: Vec<RawLink>,
    #[serde(default)]
    slices: Vec<RawSlice>,
    #[serde(default)]
    applications: Vec<RawApplication>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: String,
    tier: Tier,
    compute_capacity: Option<RawQuantity>,
    compute_power: Option<RawQuantity>,
    idle_power: Option<RawQuantity>,
    max_power: Option<RawQuantity>,
    uplink_capacity: Option<RawQuantity>,
    downlink_capacity: Option<RawQuantity>,
    tx_energy_per_bit: Option<RawQuantity>,
    rx_energy_per_bit: Option<RawQuantity>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    from: String,
    to: String,
    bandwidth: Option<RawQuantity>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSlice {
    app: String,
    node: Option<String>,
    link: Option<(String, String)>,
    compute_fraction: Option<RawQuantity>,
    bandwidth_fraction: Option<RawQuantity>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExit {
    index: usize,
    ops: RawQuantity,
    fraction: Option<RawQuantity>,
    accuracy: RawQuantity,
    #[serde(default)]
    features: Option<RawQuantity>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    index: Option<usize>,
    features: RawQuantity,
    ops: RawQuantity,
    exit: Option<RawExit>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    #[serde(default)]
    name: String,
    input_features: Option<RawQuantity>,
    blocks: Vec<RawBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawApplication {
    id: String,
    source_node: String,
    inference_rate: Option<RawQuantity>,
    target_accuracy: RawQuantity,
    target_latency: RawQuantity,
    bits_per_feature: Option<RawQuantity>,
    model: RawModel,
}

fn load_raw(path: &Path, stack: &mut Vec<PathBuf>) -> Result<RawScenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: RawScenario = serde_json::from_str(&text).map_err(|source| ScenarioError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let canonical = path.canonicalize().unwrap_or_else(|_| path.to_path_buf());
    if stack.contains(&canonical) {
        return Err(ScenarioError::invalid(
            "include cycle",
            path.display().to_string(),
        ));
    }
    stack.push(canonical);
    let base = path.parent().unwrap_or(Path::new("."));
    let merged = merge_includes(file, base, stack)?;
    stack.pop();
    Ok(merged)
}

fn merge_includes(
    file: RawScenario,
    base: &Path,
    stack: &mut Vec<PathBuf>,
) -> Result<RawScenario, ScenarioError> {
    let mut merged = RawScenario::default();
    for inc in &file.include {
        let child = load_raw(&base.join(inc), stack)?;
        merged.nodes.extend(child.nodes);
        merged.links.extend(child.links);
        merged.slices.extend(child.slices);
        merged.applications.extend(child.applications);
    }
    merged.nodes.extend(file.nodes);
    merged.links.extend(file.links);
    merged.slices.extend(file.slices);
    merged.applications.extend(file.applications);
    // the same include reached through two paths contributes once
    dedup_by_key(&mut merged.nodes, |n| n.id.clone());
    dedup_by_key(&mut merged.links, |l| (l.from.clone(), l.to.clone()));
    Ok(merged)
}

fn dedup_by_key<T, K: Ord>(items: &mut Vec<T>, key: impl Fn(&T) -> K) {
    let mut seen = std::collections::BTreeSet::new();
    items.retain(|item| seen.insert(key(item)));
}

fn qty(
    raw: &Option<RawQuantity>,
    dim: Dimension,
    default: f64,
    context: impl FnOnce() -> String,
) -> Result<f64, ScenarioError> {
    match raw {
        None => Ok(default),
        Some(q) => q.resolve(dim).map_err(|source| ScenarioError::Unit {
            context: context(),
            source,
        }),
    }
}

fn req(raw: &RawQuantity, dim: Dimension, context: impl FnOnce() -> String) -> Result<f64, ScenarioError> {
    raw.resolve(dim).map_err(|source| ScenarioError::Unit {
        context: context(),
        source,
    })
}

impl RawScenario {
    fn resolve(self) -> Result<Scenario, ScenarioError> {
        let nodes = self
            .nodes
            .into_iter()
            .map(|n| {
                let id = n.id.clone();
                let c = |field: &str| format!("node `{id}` field `{field}`");
                Ok(NetworkNode {
                    compute_capacity: qty(&n.compute_capacity, Dimension::ComputeRate, 0.0, || c("compute_capacity"))?,
                    compute_power: qty(&n.compute_power, Dimension::Power, 0.0, || c("compute_power"))?,
                    idle_power: qty(&n.idle_power, Dimension::Power, 0.0, || c("idle_power"))?,
                    max_power: qty(&n.max_power, Dimension::Power, 0.0, || c("max_power"))?,
                    uplink_capacity: qty(&n.uplink_capacity, Dimension::Bandwidth, f64::INFINITY, || c("uplink_capacity"))?,
                    downlink_capacity: qty(&n.downlink_capacity, Dimension::Bandwidth, f64::INFINITY, || c("downlink_capacity"))?,
                    tx_energy_per_bit: qty(&n.tx_energy_per_bit, Dimension::EnergyPerBit, 0.0, || c("tx_energy_per_bit"))?,
                    rx_energy_per_bit: qty(&n.rx_energy_per_bit, Dimension::EnergyPerBit, 0.0, || c("rx_energy_per_bit"))?,
                    id: n.id,
                    tier: n.tier,
                })
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;

        let links = self
            .links
            .into_iter()
            .map(|l| {
                let bandwidth = qty(&l.bandwidth, Dimension::Bandwidth, f64::INFINITY, || {
                    format!("link `{}->{}` field `bandwidth`", l.from, l.to)
                })?;
                Ok(Link {
                    from: l.from,
                    to: l.to,
                    bandwidth,
                })
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;

        let slices = self
            .slices
            .into_iter()
            .map(|s| {
                let target = match (s.node, s.link) {
                    (Some(n), None) => SliceTarget::Node(n),
                    (None, Some((a, b))) => SliceTarget::Link(a, b),
                    _ => {
                        return Err(ScenarioError::invalid(
                            "slice must name exactly one of `node` or `link`",
                            &s.app,
                        ))
                    }
                };
                let ctx = |field: &str| format!("slice of `{}` field `{field}`", s.app);
                let compute_fraction = s
                    .compute_fraction
                    .as_ref()
                    .map(|q| req(q, Dimension::Fraction, || ctx("compute_fraction")))
                    .transpose()?;
                let bandwidth_fraction = s
                    .bandwidth_fraction
                    .as_ref()
                    .map(|q| req(q, Dimension::Fraction, || ctx("bandwidth_fraction")))
                    .transpose()?;
                Ok(SliceShare {
                    app: s.app,
                    target,
                    compute_fraction,
                    bandwidth_fraction,
                })
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;

        let applications = self
            .applications
            .into_iter()
            .map(RawApplication::resolve)
            .collect::<Result<Vec<_>, ScenarioError>>()?;

        Ok(Scenario {
            nodes,
            links,
            slices,
            applications,
        })
    }
}

impl RawApplication {
    fn resolve(self) -> Result<Application, ScenarioError> {
        let id = self.id.clone();
        let ctx = |field: &str| format!("application `{id}` field `{field}`");
        let mut blocks = Vec::with_capacity(self.model.blocks.len());
        for (i, b) in self.model.blocks.into_iter().enumerate() {
            let index = b.index.unwrap_or(i + 1);
            let bctx = |field: &str| format!("application `{id}` block {index} field `{field}`");
            let exit = match b.exit {
                None => None,
                Some(e) => Some(EarlyExit {
                    index: e.index,
                    ops: req(&e.ops, Dimension::Operations, || bctx("exit.ops"))?,
                    fraction: qty(&e.fraction, Dimension::Fraction, f64::NAN, || bctx("exit.fraction"))?,
                    accuracy: req(&e.accuracy, Dimension::Fraction, || bctx("exit.accuracy"))?,
                    features: qty(&e.features, Dimension::Count, 0.0, || bctx("exit.features"))?,
                }),
            };
            blocks.push(DnnBlock {
                index,
                features: req(&b.features, Dimension::Count, || bctx("features"))?,
                ops: req(&b.ops, Dimension::Operations, || bctx("ops"))?,
                exit,
            });
        }
        settle_final_exit_fraction(&id, &mut blocks)?;
        Ok(Application {
            source_node: self.source_node,
            inference_rate: qty(&self.inference_rate, Dimension::Count, 1.0, || ctx("inference_rate"))?,
            target_accuracy: req(&self.target_accuracy, Dimension::Fraction, || ctx("target_accuracy"))?,
            target_latency: req(&self.target_latency, Dimension::Time, || ctx("target_latency"))?,
            bits_per_feature: qty(&self.bits_per_feature, Dimension::Count, DEFAULT_BITS_PER_FEATURE, || {
                ctx("bits_per_feature")
            })?,
            model: DnnModel {
                name: self.model.name,
                input_features: qty(&self.model.input_features, Dimension::Count, 0.0, || {
                    ctx("model.input_features")
                })?,
                blocks,
            },
            id: self.id,
        })
    }
}

/// The final exit captures every sample not output earlier; a declared value
/// must agree with that remainder within [`EXIT_FRACTION_TOLERANCE`].
fn settle_final_exit_fraction(app: &str, blocks: &mut [DnnBlock]) -> Result<(), ScenarioError> {
    let Some(last) = blocks.iter().rposition(|b| b.exit.is_some()) else {
        return Ok(());
    };
    let earlier: f64 = blocks[..last]
        .iter()
        .filter_map(|b| b.exit.as_ref())
        .map(|e| e.fraction)
        .sum();
    if blocks[..last]
        .iter()
        .filter_map(|b| b.exit.as_ref())
        .any(|e| e.fraction.is_nan())
    {
        return Err(ScenarioError::invalid(
            "only the final exit may omit its fraction",
            app,
        ));
    }
    let remainder = 1.0 - earlier;
    let exit = blocks[last].exit.as_mut().expect("checked above");
    if exit.fraction.is_nan() || (exit.fraction - remainder).abs() <= EXIT_FRACTION_TOLERANCE {
        exit.fraction = remainder.max(0.0);
    }
    Ok(())
}
