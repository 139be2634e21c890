use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agents::{AgentConfig, Algorithm, Exploration};
use crate::env::EnvConfig;
use crate::error::{config_err, Error, Result};
use crate::fingerprint;

/// A controller to benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "ddqn-ucb")]
    DdqnUcb,
    #[serde(rename = "ddqn-egreedy")]
    DdqnEpsilon,
    #[serde(rename = "dqn-ucb")]
    DqnUcb,
    #[serde(rename = "dqn-egreedy")]
    DqnEpsilon,
    #[serde(rename = "d3qn-ucb")]
    D3qnUcb,
    #[serde(rename = "d3qn-egreedy")]
    D3qnEpsilon,
    /// Power-only double DQN with the time-switching factor pinned at 0.5.
    #[serde(rename = "fixed-rho-ucb")]
    FixedRhoUcb,
    #[serde(rename = "fixed-rho-egreedy")]
    FixedRhoEpsilon,
}

impl Strategy {
    pub const ALL: [Strategy; 9] = [
        Strategy::Random,
        Strategy::DdqnUcb,
        Strategy::DdqnEpsilon,
        Strategy::DqnUcb,
        Strategy::DqnEpsilon,
        Strategy::D3qnUcb,
        Strategy::D3qnEpsilon,
        Strategy::FixedRhoUcb,
        Strategy::FixedRhoEpsilon,
    ];

    /// Time-switching factor used by the power-only learners.
    pub const FIXED_RHO: f64 = 0.5;

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::DdqnUcb => "ddqn-ucb",
            Strategy::DdqnEpsilon => "ddqn-egreedy",
            Strategy::DqnUcb => "dqn-ucb",
            Strategy::DqnEpsilon => "dqn-egreedy",
            Strategy::D3qnUcb => "d3qn-ucb",
            Strategy::D3qnEpsilon => "d3qn-egreedy",
            Strategy::FixedRhoUcb => "fixed-rho-ucb",
            Strategy::FixedRhoEpsilon => "fixed-rho-egreedy",
        }
    }

    /// Learner configuration for this strategy, `None` for the random policy.
    /// Everything other than the rule, architecture, exploration and action
    /// grid is taken from `base`.
    pub fn agent_config(self, base: &AgentConfig) -> Option<AgentConfig> {
        use Strategy::*;
        let (algorithm, exploration, fixed_rho) = match self {
            Random => return None,
            DdqnUcb => (Algorithm::Ddqn, Exploration::Ucb, None),
            DdqnEpsilon => (Algorithm::Ddqn, Exploration::EpsilonGreedy, None),
            DqnUcb => (Algorithm::Dqn, Exploration::Ucb, None),
            DqnEpsilon => (Algorithm::Dqn, Exploration::EpsilonGreedy, None),
            D3qnUcb => (Algorithm::D3qn, Exploration::Ucb, None),
            D3qnEpsilon => (Algorithm::D3qn, Exploration::EpsilonGreedy, None),
            FixedRhoUcb => (Algorithm::Ddqn, Exploration::Ucb, Some(Self::FIXED_RHO)),
            FixedRhoEpsilon => (Algorithm::Ddqn, Exploration::EpsilonGreedy, Some(Self::FIXED_RHO)),
        };
        Some(AgentConfig {
            algorithm,
            exploration,
            fixed_rho,
            ..base.clone()
        })
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Strategy::ALL.iter().map(|s| s.name()).collect();
                config_err(format!("unknown strategy {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// Environment parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Slots occupied by the primary user, `L`.
    #[serde(alias = "L")]
    PuSlots,
    /// Slots per episode, `T`. The primary user keeps its share of the
    /// episode, so `pu_slots` is rescaled to `round(L * T' / T)`.
    #[serde(alias = "T")]
    NumSlots,
    /// Initial battery, `B0`.
    #[serde(alias = "B0")]
    BatteryInit,
    /// Slot duration.
    Tau,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::PuSlots => "pu_slots",
            SweepAxis::NumSlots => "num_slots",
            SweepAxis::BatteryInit => "battery_init",
            SweepAxis::Tau => "tau",
        }
    }

    /// Copy of `env` with this axis set to `value`, validated.
    pub fn apply(self, env: &EnvConfig, value: f64) -> Result<EnvConfig> {
        let as_count = |v: f64| {
            if v >= 0.0 && v.fract() == 0.0 && v.is_finite() {
                Ok(v as usize)
            } else {
                Err(config_err(format!("{} needs a non-negative integer, got {v}", self.name())))
            }
        };
        let mut out = env.clone();
        match self {
            SweepAxis::PuSlots => out.pu_slots = as_count(value)?,
            SweepAxis::NumSlots => {
                let slots = as_count(value)?;
                if env.num_slots > 0 {
                    out.pu_slots = (env.pu_slots as f64 * slots as f64 / env.num_slots as f64).round() as usize;
                }
                out.num_slots = slots;
            }
            SweepAxis::BatteryInit => out.battery_init = value,
            SweepAxis::Tau => out.tau = value,
        }
        out.validate()
            .map_err(|e| config_err(format!("sweep value {}={value} is invalid: {e}", self.name())))?;
        Ok(out)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pu_slots" | "L" => Ok(SweepAxis::PuSlots),
            "num_slots" | "T" => Ok(SweepAxis::NumSlots),
            "battery_init" | "B0" => Ok(SweepAxis::BatteryInit),
            "tau" => Ok(SweepAxis::Tau),
            other => Err(config_err(format!(
                "unknown sweep axis {other:?}; expected pu_slots, num_slots, battery_init or tau"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// Everything needed to reproduce a set of training runs.
///
/// Files use flat TOML with dotted section names:
///
/// ```toml
/// episodes = 2500
/// seeds = [1, 2, 3, 4, 5]
/// strategies = ["random", "ddqn-ucb"]
/// env.pu_slots = 18
/// agent.ucb_c = 2.5
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub episodes: usize,
    pub seeds: Vec<u64>,
    pub strategies: Vec<Strategy>,
    /// Trailing moving-average window for the smoothed ASR curve.
    pub smoothing_window: usize,
    /// Episodes at the end of training averaged into the final ASR.
    pub final_window: usize,
    /// Not part of the configuration fingerprint.
    pub output_dir: PathBuf,
    pub sweep: Option<SweepSpec>,
    pub env: EnvConfig,
    pub agent: AgentConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            episodes: 2500,
            seeds: vec![1, 2, 3, 4, 5],
            strategies: Strategy::ALL.to_vec(),
            smoothing_window: 50,
            final_window: 500,
            output_dir: PathBuf::from("results"),
            sweep: None,
            env: EnvConfig::default(),
            agent: AgentConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Desk-scale preset: 600 episodes on a 6-128-64 network.
    pub fn fast(mut self) -> Self {
        self.episodes = 600;
        self.agent.hidden1 = 128;
        self.agent.hidden2 = 64;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.agent.validate()?;
        if self.episodes == 0 {
            return Err(config_err("episodes must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(config_err("at least one seed is required"));
        }
        if self.strategies.is_empty() {
            return Err(config_err("at least one strategy is required"));
        }
        if self.smoothing_window == 0 || self.final_window == 0 {
            return Err(config_err("smoothing_window and final_window must be positive"));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(config_err("sweep needs at least one value"));
            }
            for &v in &sweep.values {
                sweep.axis.apply(&self.env, v)?;
            }
        }
        Ok(())
    }

    /// SHA-256 of the configuration, excluding where results are written.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        fingerprint(&c)
    }

    /// First 12 hex digits of [`ExperimentConfig::hash`], used in file names.
    pub fn short_hash(&self) -> String {
        self.hash()[..12].to_string()
    }
}
