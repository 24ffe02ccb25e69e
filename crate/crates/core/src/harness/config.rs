//! JSON experiment configuration and `key=value` overrides.
//!
//! ```json
//! {
//!   "seed": 1,
//!   "scenario": { "node_count": 6, "horizon": 1400, "frame_len": 3, "budget_avg": 167 },
//!   "policy": { "name": "psp", "v": 100, "theta": 50, "beta": 0.65 },
//!   "predictor": { "kind": "oracle_noisy", "accuracies": [0.904, 0.839, 0.548] },
//!   "trace": { "source": "synthetic", "stickiness": 0.5 },
//!   "sweep": { "axis": "v", "values": [10, 100, 1000] }
//! }
//! ```
//!
//! Every field is optional. Relative paths resolve against the config file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{Scenario, SlotObservation};
use crate::policies::{PolicyConfig, PolicyKind};
use crate::predict::{MobilityTrace, PredictorSpec};

use super::scenario::{generate_scenario, synthetic_trace, ScenarioParams};
use super::sim::{simulate, RunRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicySection {
    pub name: PolicyKind,
    pub v: f64,
    pub theta: f64,
    pub beta: f64,
    pub lm_gamma: f64,
    pub plm_weight: f64,
}

impl Default for PolicySection {
    fn default() -> Self {
        PolicySection::from_params(PolicyKind::Osp, PolicyConfig::default())
    }
}

impl PolicySection {
    pub fn from_params(name: PolicyKind, p: PolicyConfig) -> Self {
        PolicySection { name, v: p.v, theta: p.theta, beta: p.beta, lm_gamma: p.lm_gamma, plm_weight: p.plm_weight }
    }

    pub fn params(&self) -> PolicyConfig {
        PolicyConfig {
            v: self.v,
            theta: self.theta,
            beta: self.beta,
            lm_gamma: self.lm_gamma,
            plm_weight: self.plm_weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum TraceSource {
    /// Markov mobility trace; `seed` defaults to one derived from the experiment seed.
    Synthetic {
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default = "default_stickiness")]
        stickiness: f64,
    },
    /// `slot,region` CSV file.
    File { path: PathBuf },
}

fn default_stickiness() -> f64 {
    0.5
}

impl Default for TraceSource {
    fn default() -> Self {
        TraceSource::Synthetic { seed: None, stickiness: default_stickiness() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    V,
    #[serde(alias = "budget_avg")]
    EAvg,
    FrameLen,
    Theta,
    Beta,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::V => "v",
            SweepAxis::EAvg => "e_avg",
            SweepAxis::FrameLen => "frame_len",
            SweepAxis::Theta => "theta",
            SweepAxis::Beta => "beta",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    /// Policies to run at every axis value; defaults to `policy.name`.
    #[serde(default)]
    pub policies: Option<Vec<PolicyKind>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub scenario: ScenarioParams,
    /// JSON file holding scenario parameters; replaces `scenario` when set.
    pub scenario_file: Option<PathBuf>,
    pub policy: PolicySection,
    pub predictor: PredictorSpec,
    pub trace: TraceSource,
    pub sweep: Option<SweepSpec>,
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            scenario: ScenarioParams::default(),
            scenario_file: None,
            policy: PolicySection::default(),
            predictor: PredictorSpec::default(),
            trace: TraceSource::default(),
            sweep: None,
            output: None,
            base_dir: None,
        }
    }
}

/// Everything a run needs, resolved from a config.
#[derive(Debug, Clone)]
pub struct Materialized {
    pub params: ScenarioParams,
    pub scenario: Scenario,
    pub observations: Vec<SlotObservation>,
    pub predictor: PredictorSpec,
}

/// SplitMix64 finalizer, used to give each random stream its own seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const SCENARIO_STREAM: u64 = 1;
const TRACE_STREAM: u64 = 2;
const PREDICTOR_STREAM: u64 = 3;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigFile { path: path.to_owned(), reason: e.to_string() })?;
        let mut cfg =
            Self::from_json(&text).map_err(|e| Error::ConfigFile { path: path.to_owned(), reason: e.to_string() })?;
        cfg.base_dir = path.parent().map(Path::to_owned);
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_owned(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.policy.params().validate()?;
        self.predictor.validate()?;
        if self.scenario_file.is_none() {
            self.scenario.validate()?;
        }
        if let TraceSource::Synthetic { stickiness, .. } = self.trace {
            if !(0.0..=1.0).contains(&stickiness) {
                return Err(Error::Config(format!("trace stickiness must lie in [0, 1], got {stickiness}")));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Config("sweep values must not be empty".into()));
            }
            if matches!(sweep.policies.as_deref(), Some([])) {
                return Err(Error::Config("sweep policies must not be empty".into()));
            }
            if sweep.axis == SweepAxis::FrameLen && sweep.values.iter().any(|v| !(v.fract() == 0.0 && *v >= 1.0)) {
                return Err(Error::Config("frame_len sweep values must be positive integers".into()));
            }
        }
        Ok(())
    }

    /// Sets the field at dotted `key` to `value`, parsed as JSON when possible
    /// and as a plain string otherwise. Unknown keys are rejected.
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<()> {
        let mut root = serde_json::to_value(&*self).expect("config serializes");
        let parsed = serde_json::from_str::<Value>(value).unwrap_or_else(|_| Value::String(value.to_owned()));
        let segments: Vec<&str> = key.split('.').collect();
        if segments.iter().any(|s| s.is_empty()) {
            return Err(Error::Config(format!("malformed override key `{key}`")));
        }
        let mut node = &mut root;
        for (depth, seg) in segments.iter().enumerate() {
            if node.is_null() {
                *node = Value::Object(Default::default());
            }
            let Value::Object(map) = node else {
                return Err(Error::Config(format!(
                    "override `{key}`: `{}` is not a section",
                    segments[..depth].join(".")
                )));
            };
            let last = depth + 1 == segments.len();
            let known = map.contains_key(*seg);
            if !known && !(map.is_empty() && last) {
                return Err(Error::Config(format!("override `{key}`: unknown key `{seg}`")));
            }
            node = map.entry(seg.to_string()).or_insert(Value::Null);
        }
        *node = parsed;
        let mut updated: ExperimentConfig =
            serde_json::from_value(root).map_err(|e| Error::Config(format!("override `{key}={value}`: {e}")))?;
        updated.base_dir = self.base_dir.clone();
        updated.validate()?;
        *self = updated;
        Ok(())
    }

    pub fn scenario_params(&self) -> Result<ScenarioParams> {
        match &self.scenario_file {
            None => Ok(self.scenario.clone()),
            Some(p) => {
                let path = self.resolve(p);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::ConfigFile { path: path.clone(), reason: e.to_string() })?;
                let params: ScenarioParams = serde_json::from_str(&text)
                    .map_err(|e| Error::ConfigFile { path: path.clone(), reason: e.to_string() })?;
                params.validate()?;
                Ok(params)
            }
        }
    }

    pub fn load_trace(&self, params: &ScenarioParams) -> Result<MobilityTrace> {
        match &self.trace {
            TraceSource::Synthetic { seed, stickiness } => synthetic_trace(
                seed.unwrap_or_else(|| derive_seed(self.seed, TRACE_STREAM)),
                params.node_count,
                params.horizon,
                *stickiness,
            ),
            TraceSource::File { path } => MobilityTrace::load(&self.resolve(path)),
        }
    }

    /// Predictor spec with its noise seed mixed with the experiment seed.
    pub fn seeded_predictor(&self) -> PredictorSpec {
        match &self.predictor {
            PredictorSpec::OracleNoisy { accuracies, rng_seed } => PredictorSpec::OracleNoisy {
                accuracies: accuracies.clone(),
                rng_seed: derive_seed(self.seed ^ rng_seed, PREDICTOR_STREAM),
            },
            other => other.clone(),
        }
    }

    pub fn materialize(&self) -> Result<Materialized> {
        self.validate()?;
        let params = self.scenario_params()?;
        let trace = self.load_trace(&params)?;
        let (scenario, observations) = generate_scenario(&params, &trace, derive_seed(self.seed, SCENARIO_STREAM))?;
        Ok(Materialized { params, scenario, observations, predictor: self.seeded_predictor() })
    }

    /// Runs the configured policy once.
    pub fn run(&self) -> Result<RunRecord> {
        let m = self.materialize()?;
        simulate(&m.scenario, &m.observations, self.policy.name, &self.policy.params(), &m.predictor)
    }
}
