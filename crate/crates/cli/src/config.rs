//! Experiment configuration: JSON in, validated [`ExperimentConfig`] out.
//!
//! Validation never stops at the first problem; every error found is
//! returned together so a config can be fixed in one pass.

use std::fmt;
use std::path::PathBuf;

use myopic_df::{
    BrcConfig, CombiningMode, DmcChannel, Encoder, FactorizedInput, MarcConfig, NetworkGeometry,
    OptimizerConfig, Permutation, PowerConfig, PropagationModel,
};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Mrc,
    Marc,
    Brc,
    Large,
    Discrete,
}

pub const SCENARIOS: [&str; 5] = ["mrc", "marc", "brc", "large", "discrete"];

impl Scenario {
    pub fn parse(tag: &str) -> Option<Self> {
        Some(match tag {
            "mrc" => Self::Mrc,
            "marc" => Self::Marc,
            "brc" => Self::Brc,
            "large" => Self::Large,
            "discrete" => Self::Discrete,
            _ => return None,
        })
    }

    pub fn tag(self) -> &'static str {
        match self {
            Self::Mrc => "mrc",
            Self::Marc => "marc",
            Self::Brc => "brc",
            Self::Large => "large",
            Self::Discrete => "discrete",
        }
    }

    fn sweep_variables(self) -> &'static [&'static str] {
        match self {
            Self::Mrc => &["power_w", "noise_w", "spacing_m"],
            Self::Marc => &["power_w", "p3_w", "d34_m"],
            Self::Brc => &["power_w", "d12_m"],
            Self::Large => &["nodes", "power_w"],
            Self::Discrete => &[],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    Hops(usize),
    Omniscient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrategySpec {
    pub view: View,
    pub mode: CombiningMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub log: bool,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                if i + 1 == n {
                    self.stop
                } else if self.log {
                    (self.start.ln() + f * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + f * (self.stop - self.start)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MrcParams {
    pub nodes: usize,
    /// Gaps between consecutive nodes, m.
    pub spacings: Vec<f64>,
    pub power: f64,
    pub noise: f64,
    pub relay_order: Option<Vec<usize>>,
    pub optimize_spacing: bool,
    pub optimize_permutation: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarcParams {
    pub channel: MarcConfig,
    pub asymmetric: bool,
    pub source_power_range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LargeParams {
    pub nodes: usize,
    pub power: f64,
    pub noise: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteParams {
    pub channel: DmcChannel,
    pub input: FactorizedInput,
    pub relay_order: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Mrc(MrcParams),
    Marc(MarcParams),
    Brc(BrcConfig),
    Large(LargeParams),
    Discrete(DiscreteParams),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub propagation: PropagationModel,
    pub params: Params,
    pub sweep: Option<Sweep>,
    pub strategies: Vec<StrategySpec>,
    pub optimizer: OptimizerConfig,
    pub output: OutputPaths,
    /// Defaults applied silently to the config, reported to the user.
    pub notes: Vec<String>,
}

impl ExperimentConfig {
    pub fn node_count(&self) -> Option<usize> {
        match &self.params {
            Params::Mrc(p) => Some(p.nodes),
            Params::Large(p) => Some(p.nodes),
            Params::Discrete(p) => Some(p.channel.node_count()),
            Params::Marc(_) | Params::Brc(_) => None,
        }
    }
}

/// Every problem found in a config.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationErrors(pub Vec<String>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

const TOP_KEYS: &[&str] = &[
    "scenario",
    "kappa",
    "eta",
    "allow_exploratory_eta",
    "mrc",
    "marc",
    "brc",
    "large",
    "discrete",
    "sweep",
    "strategies",
    "optimizer",
    "output",
];
const MRC_KEYS: &[&str] = &[
    "nodes",
    "spacing_m",
    "spacings_m",
    "power_w",
    "noise_w",
    "relay_order",
    "optimize_spacing",
    "optimize_permutation",
];
const MARC_KEYS: &[&str] = &["p1_w", "p2_w", "p3_w", "n3_w", "n4_w", "d34_m", "asymmetric", "source_power_range_w"];
const BRC_KEYS: &[&str] = &["p1_w", "p2_w", "n2_w", "n3_w", "n4_w", "d12_m"];
const LARGE_KEYS: &[&str] = &["nodes", "power_w", "noise_w", "alpha"];
const DISCRETE_KEYS: &[&str] = &["inputs", "outputs", "table", "pmfs", "encoders", "relay_order"];
const SWEEP_KEYS: &[&str] = &["variable", "start", "stop", "steps", "scale"];
const STRATEGY_KEYS: &[&str] = &["k", "omniscient", "mode"];
const OPTIMIZER_KEYS: &[&str] = &[
    "resolution",
    "rounds",
    "shrink",
    "tolerance",
    "max_evaluations",
    "full_grid_limit",
    "max_rounds",
];
const OUTPUT_KEYS: &[&str] = &["csv", "svg"];

/// Longest chain the `mrc` and `large` scenarios accept.
const MAX_NODES: usize = myopic_df::asymptotics::MAX_CHAIN_NODES;

struct Reader {
    errors: Vec<String>,
}

impl Reader {
    fn err(&mut self, msg: impl Into<String>) {
        self.errors.push(msg.into());
    }

    /// The object at `path`, with unknown keys reported.
    fn section<'a>(&mut self, v: Option<&'a Value>, path: &str, known: &[&str]) -> Option<&'a Map<String, Value>> {
        let map = match v? {
            Value::Object(m) => m,
            _ => {
                self.err(format!("{path}: expected an object"));
                return None;
            }
        };
        for key in map.keys() {
            if !known.contains(&key.as_str()) {
                self.err(format!("{path}.{key}: unknown key (expected one of {})", known.join(", ")));
            }
        }
        Some(map)
    }

    fn num(&mut self, m: Option<&Map<String, Value>>, path: &str, key: &str, default: f64) -> f64 {
        match m.and_then(|m| m.get(key)) {
            None => default,
            Some(Value::Number(n)) => n.as_f64().unwrap_or(default),
            Some(_) => {
                self.err(format!("{path}.{key}: expected a number"));
                default
            }
        }
    }

    fn positive(&mut self, m: Option<&Map<String, Value>>, path: &str, key: &str, default: f64) -> f64 {
        let x = self.num(m, path, key, default);
        if !(x > 0.0 && x.is_finite()) {
            self.err(format!("{path}.{key}: must be positive, got {x}"));
        }
        x
    }

    fn non_negative(&mut self, m: Option<&Map<String, Value>>, path: &str, key: &str, default: f64) -> f64 {
        let x = self.num(m, path, key, default);
        if !(x >= 0.0 && x.is_finite()) {
            self.err(format!("{path}.{key}: must be >= 0, got {x}"));
        }
        x
    }

    fn count(&mut self, m: Option<&Map<String, Value>>, path: &str, key: &str, default: usize) -> usize {
        match m.and_then(|m| m.get(key)) {
            None => default,
            Some(v) => match v.as_u64() {
                Some(n) => n as usize,
                None => {
                    self.err(format!("{path}.{key}: expected a non-negative integer"));
                    default
                }
            },
        }
    }

    fn flag(&mut self, m: Option<&Map<String, Value>>, path: &str, key: &str) -> bool {
        match m.and_then(|m| m.get(key)) {
            None => false,
            Some(Value::Bool(b)) => *b,
            Some(_) => {
                self.err(format!("{path}.{key}: expected true or false"));
                false
            }
        }
    }

    fn text<'a>(&mut self, m: Option<&'a Map<String, Value>>, path: &str, key: &str) -> Option<&'a str> {
        match m.and_then(|m| m.get(key))? {
            Value::String(s) => Some(s),
            _ => {
                self.err(format!("{path}.{key}: expected a string"));
                None
            }
        }
    }

    fn list<T: serde::de::DeserializeOwned>(&mut self, m: Option<&Map<String, Value>>, path: &str, key: &str) -> Option<T> {
        let v = m.and_then(|m| m.get(key))?;
        match serde_json::from_value(v.clone()) {
            Ok(x) => Some(x),
            Err(e) => {
                self.err(format!("{path}.{key}: {e}"));
                None
            }
        }
    }
}

/// Parses and validates `text`. `scenario` (from the subcommand) fills in
/// or must agree with the config's own `scenario` key.
pub fn validate_config(text: &str, scenario: Option<Scenario>) -> Result<ExperimentConfig, ValidationErrors> {
    let root: Value = serde_json::from_str(text).map_err(|e| ValidationErrors(vec![format!("malformed JSON: {e}")]))?;
    validate_value(&root, scenario)
}

pub fn validate_value(root: &Value, scenario: Option<Scenario>) -> Result<ExperimentConfig, ValidationErrors> {
    let mut r = Reader { errors: Vec::new() };
    let mut notes = Vec::new();
    let top = r.section(Some(root), "config", TOP_KEYS);

    let tagged = match r.text(top, "config", "scenario") {
        Some(tag) => match Scenario::parse(tag) {
            Some(s) => Some(s),
            None => {
                r.err(format!("config.scenario: unknown scenario {tag:?} (valid: {})", SCENARIOS.join(", ")));
                None
            }
        },
        None => None,
    };
    let scenario = match (tagged, scenario) {
        (Some(a), Some(b)) if a != b => {
            r.err(format!("config.scenario is {a} but the {b} subcommand was used"));
            b
        }
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => {
            if r.errors.is_empty() {
                r.err(format!("config.scenario: missing (valid: {})", SCENARIOS.join(", ")));
            }
            return Err(ValidationErrors(r.errors));
        }
    };
    for other in SCENARIOS {
        if other != scenario.tag() && top.is_some_and(|t| t.contains_key(other)) {
            r.err(format!("config.{other}: section does not apply to scenario {scenario}"));
        }
    }

    let kappa = r.positive(top, "config", "kappa", 1.0);
    let exploratory = r.flag(top, "config", "allow_exploratory_eta");
    let eta = if top.is_some_and(|t| t.contains_key("eta")) {
        r.num(top, "config", "eta", 2.0)
    } else {
        notes.push("eta not given; using the free-space exponent 2".to_string());
        2.0
    };
    let propagation = if exploratory {
        PropagationModel::exploratory(kappa, eta)
    } else {
        PropagationModel::new(kappa, eta)
    };
    let propagation = match propagation {
        Ok(p) => p,
        Err(e) => {
            let hint = if !exploratory && eta > 1.0 && eta < 2.0 {
                " (set allow_exploratory_eta to true to permit it)"
            } else {
                ""
            };
            r.err(format!("config.eta: {e}{hint}"));
            PropagationModel::default()
        }
    };

    let sweep = read_sweep(&mut r, top.and_then(|t| t.get("sweep")), scenario);
    let strategies = read_strategies(&mut r, top.and_then(|t| t.get("strategies")), scenario);
    let optimizer = read_optimizer(&mut r, top.and_then(|t| t.get("optimizer")));
    let output_map = r.section(top.and_then(|t| t.get("output")), "config.output", OUTPUT_KEYS);
    let output = OutputPaths {
        csv: r.text(output_map, "config.output", "csv").map(PathBuf::from),
        svg: r.text(output_map, "config.output", "svg").map(PathBuf::from),
    };

    let section = top.and_then(|t| t.get(scenario.tag()));
    let path = format!("config.{scenario}");
    let params = match scenario {
        Scenario::Mrc => read_mrc(&mut r, section, &path, &sweep, &strategies),
        Scenario::Marc => read_marc(&mut r, section, &path, &sweep, &strategies, propagation),
        Scenario::Brc => read_brc(&mut r, section, &path, &strategies, propagation),
        Scenario::Large => read_large(&mut r, section, &path, &sweep, &strategies),
        Scenario::Discrete => read_discrete(&mut r, section, &path, &strategies),
    };

    if sweep.is_none() && output.svg.is_some() {
        r.err("config.output.svg: a plot needs a sweep");
    }

    match params {
        Some(params) if r.errors.is_empty() => Ok(ExperimentConfig {
            scenario,
            propagation,
            params,
            sweep,
            strategies,
            optimizer,
            output,
            notes,
        }),
        _ => Err(ValidationErrors(r.errors)),
    }
}

fn read_sweep(r: &mut Reader, v: Option<&Value>, scenario: Scenario) -> Option<Sweep> {
    let m = r.section(v, "config.sweep", SWEEP_KEYS)?;
    let p = "config.sweep";
    if scenario == Scenario::Discrete {
        r.err("config.sweep: the discrete scenario evaluates a single channel and takes no sweep");
        return None;
    }
    let valid = scenario.sweep_variables();
    let variable = match r.text(Some(m), p, "variable") {
        Some(v) if valid.contains(&v) => v.to_string(),
        Some(v) => {
            r.err(format!("{p}.variable: {v:?} cannot be swept for {scenario} (valid: {})", valid.join(", ")));
            String::new()
        }
        None => {
            r.err(format!("{p}.variable: missing (valid: {})", valid.join(", ")));
            String::new()
        }
    };
    for key in ["start", "stop"] {
        if !m.contains_key(key) {
            r.err(format!("{p}.{key}: missing"));
        }
    }
    let start = r.num(Some(m), p, "start", 1.0);
    let stop = r.num(Some(m), p, "stop", 1.0);
    let steps = r.count(Some(m), p, "steps", 0);
    if steps < 2 {
        r.err(format!("{p}.steps: need at least 2 steps, got {steps}"));
    }
    let log = match r.text(Some(m), p, "scale") {
        None | Some("linear") => false,
        Some("log") => true,
        Some(s) => {
            r.err(format!("{p}.scale: {s:?} is neither \"linear\" nor \"log\""));
            false
        }
    };
    if !start.is_finite() || !stop.is_finite() {
        r.err(format!("{p}: start and stop must be finite"));
    } else if log && !(start > 0.0 && stop > 0.0) {
        r.err(format!("{p}: log scale needs positive start and stop, got {start} and {stop}"));
    }
    Some(Sweep {
        variable,
        start,
        stop,
        steps,
        log,
    })
}

fn read_strategies(r: &mut Reader, v: Option<&Value>, scenario: Scenario) -> Vec<StrategySpec> {
    let p = "config.strategies";
    let items = match v {
        None if scenario == Scenario::Large => {
            return vec![StrategySpec {
                view: View::Hops(2),
                mode: CombiningMode::Coherent,
            }]
        }
        None => {
            r.err(format!("{p}: missing; list at least one strategy such as {{\"k\": 1}} or {{\"omniscient\": true}}"));
            return Vec::new();
        }
        Some(Value::Array(a)) => a,
        Some(_) => {
            r.err(format!("{p}: expected an array"));
            return Vec::new();
        }
    };
    if items.is_empty() {
        r.err(format!("{p}: strategy list is empty"));
    }
    let mut out = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let path = format!("{p}[{i}]");
        let Some(m) = r.section(Some(item), &path, STRATEGY_KEYS) else { continue };
        let omniscient = r.flag(Some(m), &path, "omniscient");
        let view = match (m.contains_key("k"), omniscient) {
            (true, true) => {
                r.err(format!("{path}: give either k or omniscient, not both"));
                continue;
            }
            (true, false) => {
                let k = r.count(Some(m), &path, "k", 1);
                if k == 0 {
                    r.err(format!("{path}.k: must be at least 1"));
                }
                View::Hops(k)
            }
            (false, true) => View::Omniscient,
            (false, false) => {
                r.err(format!("{path}: needs k or omniscient"));
                continue;
            }
        };
        let mode = match r.text(Some(m), &path, "mode") {
            None | Some("coherent") => CombiningMode::Coherent,
            Some("fading") => CombiningMode::Fading,
            Some(s) => {
                r.err(format!("{path}.mode: {s:?} is neither \"coherent\" nor \"fading\""));
                CombiningMode::Coherent
            }
        };
        match scenario {
            Scenario::Marc | Scenario::Brc => {
                if view != View::Hops(1) && view != View::Omniscient {
                    r.err(format!("{path}: {scenario} compares one-hop (k = 1) and omniscient only"));
                }
                if mode == CombiningMode::Fading {
                    r.err(format!("{path}.mode: {scenario} rates assume coherent combining"));
                }
            }
            Scenario::Large => {
                if view != View::Hops(2) || mode != CombiningMode::Coherent {
                    r.err(format!("{path}: the large scenario evaluates coherent two-hop (k = 2) only"));
                }
            }
            Scenario::Mrc | Scenario::Discrete => {}
        }
        out.push(StrategySpec { view, mode });
    }
    out
}

fn read_optimizer(r: &mut Reader, v: Option<&Value>) -> OptimizerConfig {
    let d = OptimizerConfig::default();
    let p = "config.optimizer";
    let m = r.section(v, p, OPTIMIZER_KEYS);
    let cfg = OptimizerConfig {
        resolution: r.count(m, p, "resolution", d.resolution),
        rounds: r.count(m, p, "rounds", d.rounds),
        shrink: r.num(m, p, "shrink", d.shrink),
        tolerance: r.num(m, p, "tolerance", d.tolerance),
        max_evaluations: r.count(m, p, "max_evaluations", d.max_evaluations),
        full_grid_limit: r.count(m, p, "full_grid_limit", d.full_grid_limit),
        max_rounds: r.count(m, p, "max_rounds", d.max_rounds),
    };
    if let Err(e) = cfg.validate() {
        r.err(format!("{p}: {e}"));
    }
    cfg
}

/// Checks that every `k` fits a chain of `nodes` and that no two strategies
/// resolve to the same view and mode.
fn check_views(r: &mut Reader, strategies: &[StrategySpec], nodes: usize) {
    let mut seen = Vec::new();
    for (i, s) in strategies.iter().enumerate() {
        let k = match s.view {
            View::Hops(k) if k >= nodes => {
                r.err(format!("config.strategies[{i}].k: {k} exceeds T - 1 = {}", nodes - 1));
                continue;
            }
            View::Hops(k) => k,
            View::Omniscient => nodes - 1,
        };
        if seen.contains(&(k, s.mode)) {
            r.err(format!("config.strategies[{i}]: duplicates an earlier strategy (omniscient is k = T - 1)"));
        }
        seen.push((k, s.mode));
    }
}

fn check_relay_order(r: &mut Reader, order: &Option<Vec<usize>>, nodes: usize, path: &str) {
    if let Some(o) = order {
        if let Err(e) = Permutation::from_relays(nodes, o) {
            r.err(format!("{path}.relay_order: {e}"));
        }
    }
}

fn swept(sweep: &Option<Sweep>, variable: &str) -> bool {
    sweep.as_ref().is_some_and(|s| s.variable == variable)
}

fn read_mrc(
    r: &mut Reader,
    v: Option<&Value>,
    p: &str,
    sweep: &Option<Sweep>,
    strategies: &[StrategySpec],
) -> Option<Params> {
    let m = r.section(v, p, MRC_KEYS);
    let explicit: Option<Vec<f64>> = r.list(m, p, "spacings_m");
    let has_spacing = m.is_some_and(|m| m.contains_key("spacing_m"));
    if explicit.is_some() && has_spacing {
        r.err(format!("{p}: give spacing_m or spacings_m, not both"));
    }
    let nodes = match &explicit {
        Some(s) => {
            if m.is_some_and(|m| m.contains_key("nodes")) && r.count(m, p, "nodes", 0) != s.len() + 1 {
                r.err(format!("{p}.nodes: disagrees with the {} gaps in spacings_m", s.len()));
            }
            s.len() + 1
        }
        None => r.count(m, p, "nodes", 5),
    };
    if !(3..=MAX_NODES).contains(&nodes) {
        r.err(format!("{p}.nodes: need 3..={MAX_NODES} nodes, got {nodes}"));
        return None;
    }
    let spacing = r.positive(m, p, "spacing_m", 1.0);
    let spacings = explicit.unwrap_or_else(|| vec![spacing; nodes - 1]);
    if let Err(e) = NetworkGeometry::linear(&spacings) {
        r.err(format!("{p}.spacings_m: {e}"));
    }
    if swept(sweep, "spacing_m") && spacings.windows(2).any(|w| w[0] != w[1]) {
        r.err(format!("{p}: sweeping spacing_m needs equal spacing"));
    }
    let power = r.non_negative(m, p, "power_w", 10.0);
    let noise = r.positive(m, p, "noise_w", 1.0);
    let relay_order: Option<Vec<usize>> = r.list(m, p, "relay_order");
    check_relay_order(r, &relay_order, nodes, p);
    let optimize_spacing = r.flag(m, p, "optimize_spacing");
    let optimize_permutation = r.flag(m, p, "optimize_permutation");
    if optimize_permutation && relay_order.is_some() {
        r.err(format!("{p}: optimize_permutation searches the relay order; drop relay_order"));
    }
    if optimize_permutation && optimize_spacing {
        r.err(format!("{p}: optimize_spacing and optimize_permutation cannot be combined"));
    }
    if optimize_permutation && nodes > myopic_df::optimizer::MAX_PERMUTATION_NODES {
        r.err(format!(
            "{p}.optimize_permutation: limited to {} nodes",
            myopic_df::optimizer::MAX_PERMUTATION_NODES
        ));
    }
    if optimize_spacing && relay_order.is_some() {
        r.err(format!("{p}: optimize_spacing places nodes in flow order; drop relay_order"));
    }
    if let Err(e) = PowerConfig::uniform(nodes, power.max(0.0), noise.max(f64::MIN_POSITIVE)) {
        r.err(format!("{p}: {e}"));
    }
    check_views(r, strategies, nodes);
    Some(Params::Mrc(MrcParams {
        nodes,
        spacings,
        power,
        noise,
        relay_order,
        optimize_spacing,
        optimize_permutation,
    }))
}

fn read_marc(
    r: &mut Reader,
    v: Option<&Value>,
    p: &str,
    sweep: &Option<Sweep>,
    strategies: &[StrategySpec],
    propagation: PropagationModel,
) -> Option<Params> {
    let m = r.section(v, p, MARC_KEYS);
    let d = MarcConfig::default();
    let channel = MarcConfig {
        p1: r.non_negative(m, p, "p1_w", d.p1),
        p2: r.non_negative(m, p, "p2_w", d.p2),
        p3: r.non_negative(m, p, "p3_w", d.p3),
        n3: r.positive(m, p, "n3_w", d.n3),
        n4: r.positive(m, p, "n4_w", d.n4),
        d34: r.positive(m, p, "d34_m", d.d34),
        propagation,
        ..d
    };
    let asymmetric = r.flag(m, p, "asymmetric");
    let range: Option<[f64; 2]> = r.list(m, p, "source_power_range_w");
    if let Some([lo, hi]) = range {
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            r.err(format!("{p}.source_power_range_w: need 0 <= low < high, got [{lo}, {hi}]"));
        }
        if swept(sweep, "power_w") {
            r.err(format!("{p}.source_power_range_w: conflicts with sweeping power_w"));
        }
    }
    check_two_way(r, strategies);
    Some(Params::Marc(MarcParams {
        channel,
        asymmetric,
        source_power_range: range.map(|[a, b]| (a, b)),
    }))
}

fn check_two_way(r: &mut Reader, strategies: &[StrategySpec]) {
    for (i, s) in strategies.iter().enumerate() {
        if strategies[..i].iter().any(|t| t.view == s.view) {
            r.err(format!("config.strategies[{i}]: duplicates an earlier strategy"));
        }
    }
}

fn read_brc(
    r: &mut Reader,
    v: Option<&Value>,
    p: &str,
    strategies: &[StrategySpec],
    propagation: PropagationModel,
) -> Option<Params> {
    let m = r.section(v, p, BRC_KEYS);
    let d = BrcConfig::default();
    let cfg = BrcConfig {
        p1: r.non_negative(m, p, "p1_w", d.p1),
        p2: r.non_negative(m, p, "p2_w", d.p2),
        n2: r.positive(m, p, "n2_w", d.n2),
        n3: r.positive(m, p, "n3_w", d.n3),
        n4: r.positive(m, p, "n4_w", d.n4),
        d12: r.positive(m, p, "d12_m", d.d12),
        propagation,
        ..d
    };
    check_two_way(r, strategies);
    Some(Params::Brc(cfg))
}

fn read_large(
    r: &mut Reader,
    v: Option<&Value>,
    p: &str,
    sweep: &Option<Sweep>,
    strategies: &[StrategySpec],
) -> Option<Params> {
    let m = r.section(v, p, LARGE_KEYS);
    let nodes = r.count(m, p, "nodes", 50);
    if !(3..=MAX_NODES).contains(&nodes) {
        r.err(format!("{p}.nodes: need 3..={MAX_NODES} nodes, got {nodes}"));
    }
    if let Some(s) = sweep.as_ref().filter(|s| s.variable == "nodes") {
        for x in [s.start, s.stop] {
            if !(3.0..=MAX_NODES as f64).contains(&x.round()) {
                r.err(format!("config.sweep: node counts must lie in 3..={MAX_NODES}, got {x}"));
            }
        }
    }
    let power = r.non_negative(m, p, "power_w", 10.0);
    let noise = r.positive(m, p, "noise_w", 1.0);
    let alpha = r.num(m, p, "alpha", 0.5);
    if !(0.0..=1.0).contains(&alpha) {
        r.err(format!("{p}.alpha: must lie in [0, 1], got {alpha}"));
    }
    check_two_way(r, strategies);
    Some(Params::Large(LargeParams {
        nodes,
        power,
        noise,
        alpha,
    }))
}

fn read_discrete(r: &mut Reader, v: Option<&Value>, p: &str, strategies: &[StrategySpec]) -> Option<Params> {
    let Some(m) = r.section(v, p, DISCRETE_KEYS) else {
        r.err(format!("{p}: missing; the discrete scenario needs inputs, outputs, table and pmfs"));
        return None;
    };
    let need = |r: &mut Reader, key: &str| {
        if !m.contains_key(key) {
            r.err(format!("{p}.{key}: missing"));
        }
    };
    for key in ["inputs", "outputs", "table", "pmfs"] {
        need(r, key);
    }
    let inputs: Option<Vec<usize>> = r.list(Some(m), p, "inputs");
    let outputs: Option<Vec<usize>> = r.list(Some(m), p, "outputs");
    let table: Option<Vec<f64>> = r.list(Some(m), p, "table");
    let pmfs: Option<Vec<Vec<f64>>> = r.list(Some(m), p, "pmfs");
    let encoders: Option<Vec<Encoder>> = r.list(Some(m), p, "encoders");
    let relay_order: Option<Vec<usize>> = r.list(Some(m), p, "relay_order");

    let channel = match (inputs, outputs, table) {
        (Some(i), Some(o), Some(t)) => DmcChannel::new(i, o, t).map_err(|e| r.err(format!("{p}: {e}"))).ok(),
        _ => None,
    }?;
    let pmfs = pmfs?;
    let n = channel.node_count();
    let encoders = encoders.unwrap_or_else(|| vec![Encoder::OwnOnly; pmfs.len()]);
    let input = FactorizedInput::new(pmfs, encoders).map_err(|e| r.err(format!("{p}: {e}"))).ok()?;
    if input.pmfs.len() != n - 1 {
        r.err(format!("{p}.pmfs: need {} distributions (nodes 1..T-1), got {}", n - 1, input.pmfs.len()));
    }
    check_relay_order(r, &relay_order, n, p);
    check_views(r, strategies, n);
    Some(Params::Discrete(DiscreteParams {
        channel,
        input,
        relay_order,
    }))
}

/// Applies `path=value` to `root`, creating objects along the way. The
/// value is read as JSON when it parses, else as a string. Numeric path
/// segments index into arrays.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), String> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| format!("--set {assignment:?}: expected <dotted.path>=<value>"))?;
    if path.is_empty() {
        return Err(format!("--set {assignment:?}: empty path"));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Array(a) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| format!("--set {path}: {part:?} indexes an array but is not a number"))?;
                let len = a.len();
                a.get_mut(idx)
                    .ok_or_else(|| format!("--set {path}: index {idx} out of range (length {len})"))?
            }
            Value::Object(m) => m.entry(part.to_string()).or_insert(if last { Value::Null } else { Value::Object(Map::new()) }),
            _ => return Err(format!("--set {path}: {part:?} is inside a scalar")),
        };
        if last {
            *cur = value;
            return Ok(());
        }
    }
    unreachable!("split yields at least one segment")
}
