//! Experiment configuration files.
//!
//! Configs are JSON. User and channel indices are 1-based in files and
//! 0-based everywhere else. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use ssag_core::estimation::{EstimationNoise, IdleEstimator};
use ssag_core::graph::UserPlacement;
use ssag_core::learning::{LearningConfig, SmoothingSchedule};
use ssag_core::model::{dbm_to_watts, ChannelModel, ContentionMechanism, RateModel};
use ssag_core::simulator::{Policy, RunConfig, Scenario};
use ssag_core::{DirectedInterferenceGraph, GameSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub learning: LearningSection,
    #[serde(default)]
    pub estimate: EstimateSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub graph: GraphConfig,
    /// One model per channel.
    pub channels: Vec<ChannelConfig>,
    pub rates: RatesConfig,
    pub mechanism: MechanismConfig,
    /// Per-user link gain `h_n`; all ones when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    /// Directed edges `[i, j]`, 1-based.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    /// Add the reverse of every listed edge.
    #[serde(default)]
    pub undirected: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placements: Option<Vec<PlacementConfig>>,
    /// JSON file holding a graph section; relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementConfig {
    pub tx: [f64; 2],
    pub rx: [f64; 2],
    pub range: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelConfig {
    Markov { epsilon: f64, xi: f64 },
    Bernoulli { theta: f64 },
    WhiteSpace { theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RateUnit {
    #[serde(rename = "bps")]
    Bps,
    #[serde(rename = "kbps")]
    Kbps,
    #[default]
    #[serde(rename = "Mbps")]
    Mbps,
    #[serde(rename = "Gbps")]
    Gbps,
}

impl RateUnit {
    pub fn bps(self) -> f64 {
        match self {
            RateUnit::Bps => 1.0,
            RateUnit::Kbps => 1e3,
            RateUnit::Mbps => 1e6,
            RateUnit::Gbps => 1e9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesConfig {
    #[serde(default)]
    pub unit: RateUnit,
    /// Mean rate `B[n][m]`; one row per user.
    pub mean: Vec<Vec<f64>>,
    #[serde(default)]
    pub model: RateModelConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RateModelConfig {
    #[default]
    Fixed,
    /// Shannon rate under Rayleigh fading; the mean channel gain is solved
    /// so that the expected rate equals the configured mean.
    Rayleigh {
        bandwidth_hz: f64,
        power_dbm: f64,
        noise_dbm: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MechanismConfig {
    Backoff { lambda_max: u32 },
    BackoffAsymptotic,
    WeightedShare { weights: Vec<f64> },
    Aloha { p: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Better-response rounds before giving up.
    #[serde(default = "default_brd_rounds")]
    pub brd_max_rounds: usize,
    /// Profile enumeration cap for `enumerate`, `poa` and exhaustive checks.
    #[serde(default = "default_max_profiles")]
    pub max_profiles: u64,
    /// Starting profile for better-response dynamics, 1-based.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<usize>>,
    /// Random deviations checked when exhaustive checking is too large.
    #[serde(default = "default_deviation_samples")]
    pub deviation_samples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            brd_max_rounds: default_brd_rounds(),
            max_profiles: default_max_profiles(),
            start: None,
            deviation_samples: default_deviation_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleConfig {
    /// `μ_T = 1/T`.
    Harmonic,
    /// `μ_T = T^(-exponent)`.
    Power { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyConfig {
    /// Boltzmann learning at `learning.gamma`.
    Learning,
    RandomAccess,
    /// 1-based channel per user.
    FixedProfile(Vec<usize>),
    DynamicStageGame {
        restarts: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdleEstimatorConfig {
    #[default]
    Markov,
    MarkovOrFrequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningSection {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_periods")]
    pub periods: u64,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    #[serde(default = "default_schedule")]
    pub schedule: ScheduleConfig,
    /// Initial perception of every channel; `1/M` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_perception: Option<f64>,
    /// Bits/s per payoff unit. Perceptions, `γ` and the contraction bound
    /// are expressed in this unit.
    #[serde(default = "default_payoff_unit")]
    pub payoff_unit_bps: f64,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    #[serde(default)]
    pub idle_estimator: IdleEstimatorConfig,
    /// Half-width of uniform estimation noise, payoff units.
    #[serde(default)]
    pub noise_half_width: f64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_policies")]
    pub policies: Vec<PolicyConfig>,
    /// Policy run by `simulate`.
    #[serde(default = "default_policy")]
    pub policy: PolicyConfig,
    #[serde(default = "default_sweep")]
    pub gamma_sweep: Vec<f64>,
}

impl Default for LearningSection {
    fn default() -> Self {
        Self {
            gamma: default_gamma(),
            periods: default_periods(),
            t_max: default_t_max(),
            schedule: default_schedule(),
            initial_perception: None,
            payoff_unit_bps: default_payoff_unit(),
            window: default_window(),
            zeta: default_zeta(),
            idle_estimator: IdleEstimatorConfig::default(),
            noise_half_width: 0.0,
            replications: default_replications(),
            policies: default_policies(),
            policy: default_policy(),
            gamma_sweep: default_sweep(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSection {
    /// Profile held fixed while observing, 1-based; everyone on channel 1
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<usize>>,
    #[serde(default = "default_estimate_slots")]
    pub slots: usize,
}

impl Default for EstimateSection {
    fn default() -> Self {
        Self {
            profile: None,
            slots: default_estimate_slots(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Report directory unless `--out` is given.
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    /// Keep per-period welfare traces in `learn` and `simulate` reports.
    #[serde(default = "default_true")]
    pub traces: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
            traces: true,
        }
    }
}

fn default_brd_rounds() -> usize {
    1000
}
fn default_max_profiles() -> u64 {
    ssag_core::game::MAX_PROFILES
}
fn default_deviation_samples() -> usize {
    100_000
}
fn default_gamma() -> f64 {
    1.0
}
fn default_periods() -> u64 {
    1000
}
fn default_t_max() -> usize {
    100
}
fn default_schedule() -> ScheduleConfig {
    ScheduleConfig::Harmonic
}
fn default_payoff_unit() -> f64 {
    1e6
}
fn default_window() -> usize {
    50
}
fn default_zeta() -> f64 {
    1e-3
}
fn default_replications() -> usize {
    20
}
fn default_policies() -> Vec<PolicyConfig> {
    vec![PolicyConfig::Learning, PolicyConfig::RandomAccess]
}
fn default_policy() -> PolicyConfig {
    PolicyConfig::Learning
}
fn default_sweep() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 5.0, 10.0, 50.0]
}
fn default_estimate_slots() -> usize {
    100_000
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_true() -> bool {
    true
}

/// Reads, parses and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut cfg = parse_config(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    cfg.resolve_graph_file(path.parent().unwrap_or(Path::new(".")))?;
    cfg.validate()
        .map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok(cfg)
}

/// Parses config text; errors name the offending field and position.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    match serde_path_to_error::deserialize::<_, ExperimentConfig>(de) {
        Ok(c) => Ok(c),
        Err(e) => {
            let path = e.path().to_string();
            let inner = e.into_inner();
            bail!("field `{path}`: {inner}")
        }
    }
}

impl ExperimentConfig {
    /// Canonical JSON with every default filled in.
    pub fn echo(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn n_users(&self) -> usize {
        self.scenario.rates.mean.len()
    }

    pub fn n_channels(&self) -> usize {
        self.scenario.channels.len()
    }

    /// Inlines `scenario.graph.file`.
    pub fn resolve_graph_file(&mut self, base: &Path) -> Result<()> {
        let Some(file) = self.scenario.graph.file.clone() else {
            return Ok(());
        };
        let path = if file.is_absolute() {
            file
        } else {
            base.join(file)
        };
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("cannot read graph file {}", path.display()))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let g: GraphConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| anyhow!("{}: field `{}`: {}", path.display(), e.path(), e.inner()))?;
        if g.file.is_some() {
            bail!(
                "{}: graph files cannot reference other graph files",
                path.display()
            );
        }
        self.scenario.graph = g;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_users();
        let m = self.n_channels();
        if n == 0 {
            bail!("field `scenario.rates.mean`: at least one user is required");
        }
        if m == 0 {
            bail!("field `scenario.channels`: at least one channel is required");
        }
        for (k, row) in self.scenario.rates.mean.iter().enumerate() {
            if row.len() != m {
                bail!(
                    "field `scenario.rates.mean[{k}]`: expected {m} rates, found {}",
                    row.len()
                );
            }
        }
        let check_profile = |field: &str, p: &[usize]| -> Result<()> {
            if p.len() != n {
                bail!("field `{field}`: expected {n} entries, found {}", p.len());
            }
            if let Some(c) = p.iter().find(|&&c| c == 0 || c > m) {
                bail!("field `{field}`: channel {c} is outside 1..={m}");
            }
            Ok(())
        };
        if let Some(s) = &self.solver.start {
            check_profile("solver.start", s)?;
        }
        if let Some(p) = &self.estimate.profile {
            check_profile("estimate.profile", p)?;
        }
        for (k, p) in self.learning.policies.iter().enumerate() {
            if let PolicyConfig::FixedProfile(a) = p {
                check_profile(&format!("learning.policies[{k}]"), a)?;
            }
        }
        if let PolicyConfig::FixedProfile(a) = &self.learning.policy {
            check_profile("learning.policy", a)?;
        }
        let l = &self.learning;
        if !(l.gamma.is_finite() && l.gamma >= 0.0) {
            bail!("field `learning.gamma`: must be non-negative");
        }
        if l.gamma_sweep.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            bail!("field `learning.gamma_sweep`: temperatures must be non-negative");
        }
        if l.periods == 0 || l.t_max == 0 || l.replications == 0 || l.window == 0 {
            bail!(
                "fields `learning.periods`, `t_max`, `replications` and `window` must be positive"
            );
        }
        if !(l.payoff_unit_bps.is_finite() && l.payoff_unit_bps > 0.0) {
            bail!("field `learning.payoff_unit_bps`: must be positive");
        }
        if !(l.noise_half_width.is_finite() && l.noise_half_width >= 0.0) {
            bail!("field `learning.noise_half_width`: must be non-negative");
        }
        if self.estimate.slots < 2 {
            bail!("field `estimate.slots`: at least two slots are required");
        }
        self.scenario().map(|_| ())
    }

    pub fn graph(&self) -> Result<DirectedInterferenceGraph> {
        let n = self.n_users();
        let g = &self.scenario.graph;
        if g.file.is_some() {
            bail!("field `scenario.graph.file`: graph file was not resolved");
        }
        match (&g.edges, &g.placements) {
            (Some(_), Some(_)) => {
                bail!("field `scenario.graph`: give either `edges` or `placements`, not both")
            }
            (None, Some(p)) => {
                if p.len() != n {
                    bail!(
                        "field `scenario.graph.placements`: expected {n} users, found {}",
                        p.len()
                    );
                }
                let users: Vec<UserPlacement> = p
                    .iter()
                    .map(|u| UserPlacement {
                        tx: u.tx,
                        rx: u.rx,
                        range: u.range,
                    })
                    .collect();
                let dg = DirectedInterferenceGraph::from_placements(&users)
                    .map_err(|e| anyhow!("field `scenario.graph.placements`: {e}"))?;
                if g.undirected {
                    let edges: Vec<_> = dg.edges().flat_map(|(i, j)| [(i, j), (j, i)]).collect();
                    return Ok(DirectedInterferenceGraph::new(n, edges)?);
                }
                Ok(dg)
            }
            (edges, None) => {
                let mut out = Vec::new();
                for (k, &[i, j]) in edges.iter().flatten().enumerate() {
                    if i == 0 || j == 0 || i > n || j > n {
                        bail!("field `scenario.graph.edges[{k}]`: users are numbered 1..={n}");
                    }
                    out.push((i - 1, j - 1));
                    if g.undirected {
                        out.push((j - 1, i - 1));
                    }
                }
                DirectedInterferenceGraph::new(n, out)
                    .map_err(|e| anyhow!("field `scenario.graph.edges`: {e}"))
            }
        }
    }

    pub fn mechanism(&self) -> ContentionMechanism {
        match &self.scenario.mechanism {
            MechanismConfig::Backoff { lambda_max } => ContentionMechanism::Backoff {
                lambda_max: *lambda_max,
            },
            MechanismConfig::BackoffAsymptotic => ContentionMechanism::BackoffAsymptotic,
            MechanismConfig::WeightedShare { weights } => ContentionMechanism::WeightedShare {
                weights: weights.clone(),
            },
            MechanismConfig::Aloha { p } => ContentionMechanism::Aloha { p: p.clone() },
        }
    }

    /// Builds the simulation scenario, validating every model.
    pub fn scenario(&self) -> Result<Scenario> {
        let graph = self.graph()?;
        let channels = self
            .scenario
            .channels
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let model = match *c {
                    ChannelConfig::Markov { epsilon, xi } => ChannelModel::Markov { epsilon, xi },
                    ChannelConfig::Bernoulli { theta } => ChannelModel::Bernoulli { theta },
                    ChannelConfig::WhiteSpace { theta } => ChannelModel::WhiteSpace { theta },
                };
                model
                    .validate()
                    .map_err(|e| anyhow!("field `scenario.channels[{k}]`: {e}"))?;
                Ok(model)
            })
            .collect::<Result<Vec<_>>>()?;
        let unit = self.scenario.rates.unit.bps();
        let mut rates = Vec::with_capacity(self.n_users());
        for (n, row) in self.scenario.rates.mean.iter().enumerate() {
            let mut r = Vec::with_capacity(row.len());
            for (m, &b) in row.iter().enumerate() {
                let field = || format!("field `scenario.rates.mean[{n}][{m}]`");
                if !(b.is_finite() && b >= 0.0) {
                    bail!("{}: rates must be non-negative", field());
                }
                let model = match self.scenario.rates.model {
                    RateModelConfig::Fixed => RateModel::Fixed { rate: b * unit },
                    RateModelConfig::Rayleigh {
                        bandwidth_hz,
                        power_dbm,
                        noise_dbm,
                    } => {
                        if b == 0.0 {
                            RateModel::Fixed { rate: 0.0 }
                        } else {
                            RateModel::rayleigh_with_mean(
                                bandwidth_hz,
                                dbm_to_watts(power_dbm),
                                dbm_to_watts(noise_dbm),
                                b * unit,
                            )
                            .map_err(|e| anyhow!("{}: {e}", field()))?
                        }
                    }
                };
                r.push(model);
            }
            rates.push(r);
        }
        let mechanism = self.mechanism();
        let mut s = Scenario::new(graph, channels, rates, mechanism, self.learning.t_max)
            .map_err(|e| anyhow!("field `scenario`: {e}"))?;
        if let Some(g) = &self.scenario.gain {
            s.gain = g.clone();
        }
        s.payoff_unit = self.learning.payoff_unit_bps;
        s.idle_estimator = match self.learning.idle_estimator {
            IdleEstimatorConfig::Markov => IdleEstimator::Markov,
            IdleEstimatorConfig::MarkovOrFrequency => IdleEstimator::MarkovOrFrequency,
        };
        s.noise = if self.learning.noise_half_width > 0.0 {
            EstimationNoise::Uniform {
                half_width: self.learning.noise_half_width,
            }
        } else {
            EstimationNoise::None
        };
        s.validate().map_err(|e| anyhow!("field `scenario`: {e}"))?;
        Ok(s)
    }

    /// The game with payoffs in `learning.payoff_unit_bps`.
    pub fn game_spec(&self) -> Result<GameSpec> {
        Ok(self.scenario()?.game_spec()?)
    }

    pub fn schedule(&self) -> SmoothingSchedule {
        match self.learning.schedule {
            ScheduleConfig::Harmonic => SmoothingSchedule::Harmonic,
            ScheduleConfig::Power { exponent } => SmoothingSchedule::Power { exponent },
        }
    }

    pub fn policy(&self, p: &PolicyConfig) -> Policy {
        self.policy_with_gamma(p, self.learning.gamma)
    }

    pub fn policy_with_gamma(&self, p: &PolicyConfig, gamma: f64) -> Policy {
        match p {
            PolicyConfig::Learning => Policy::Learning { gamma },
            PolicyConfig::RandomAccess => Policy::RandomAccess,
            PolicyConfig::FixedProfile(a) => {
                Policy::FixedProfile(a.iter().map(|c| c - 1).collect())
            }
            PolicyConfig::DynamicStageGame { restarts } => Policy::DynamicStageGame {
                restarts: *restarts,
            },
        }
    }

    pub fn run_config(&self, seed: u64) -> RunConfig {
        let mut lc = LearningConfig::new(self.learning.gamma, self.learning.periods, seed);
        lc.schedule = self.schedule();
        lc.initial = self.learning.initial_perception;
        lc.window = self.learning.window;
        lc.zeta = self.learning.zeta;
        RunConfig {
            periods: self.learning.periods,
            seed,
            learning: lc,
        }
    }

    /// Converts a 1-based profile.
    pub fn zero_based(p: &[usize]) -> Vec<usize> {
        p.iter().map(|c| c - 1).collect()
    }
}
