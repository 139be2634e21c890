use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::neural::LrSchedule;

/// Value-learning rule and network architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Double DQN: online network selects, target network evaluates.
    Ddqn,
    /// Vanilla DQN: the target network both selects and evaluates.
    Dqn,
    /// Dueling architecture trained with double-DQN targets.
    D3qn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exploration {
    Ucb,
    EpsilonGreedy,
}

/// Learner hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    pub algorithm: Algorithm,
    pub exploration: Exploration,
    /// Discount factor.
    pub gamma: f64,
    /// Replay memory capacity.
    pub buffer_capacity: usize,
    /// Transitions stored before gradient updates and greedy selection begin.
    pub learning_starts: usize,
    pub batch_size: usize,
    /// Gradient updates between target-network synchronizations.
    pub target_sync_every: u64,
    /// UCB exploration constant `c'`.
    pub ucb_c: f64,
    pub epsilon_initial: f64,
    /// Multiplicative per-episode epsilon decay.
    pub epsilon_decay: f64,
    pub epsilon_floor: f64,
    /// Pins the time-switching factor and learns power only.
    pub fixed_rho: Option<f64>,
    pub hidden1: usize,
    pub hidden2: usize,
    pub learning_rate: f64,
    pub lr_decay_factor: f64,
    /// Episodes between learning-rate decays.
    pub lr_decay_every: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Ddqn,
            exploration: Exploration::Ucb,
            gamma: 0.99,
            buffer_capacity: 10_000,
            learning_starts: 333,
            batch_size: 80,
            target_sync_every: 200,
            ucb_c: 2.5,
            epsilon_initial: 1.0,
            epsilon_decay: 0.998,
            epsilon_floor: 0.01,
            fixed_rho: None,
            hidden1: 512,
            hidden2: 128,
            learning_rate: 2e-4,
            lr_decay_factor: 0.5,
            lr_decay_every: 500,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(config_err(format!("gamma must lie in (0, 1), got {}", self.gamma)));
        }
        if self.batch_size == 0 {
            return Err(config_err("batch_size must be positive"));
        }
        if !(self.batch_size <= self.learning_starts && self.learning_starts <= self.buffer_capacity) {
            return Err(config_err(format!(
                "need batch_size ({}) <= learning_starts ({}) <= buffer_capacity ({})",
                self.batch_size, self.learning_starts, self.buffer_capacity
            )));
        }
        if self.target_sync_every == 0 {
            return Err(config_err("target_sync_every must be positive"));
        }
        if !(self.ucb_c >= 0.0 && self.ucb_c.is_finite()) {
            return Err(config_err("ucb_c must be non-negative"));
        }
        for (name, v) in [
            ("epsilon_initial", self.epsilon_initial),
            ("epsilon_decay", self.epsilon_decay),
            ("epsilon_floor", self.epsilon_floor),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(config_err(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if let Some(rho) = self.fixed_rho {
            if !(0.0..=1.0).contains(&rho) {
                return Err(config_err(format!("fixed_rho must lie in [0, 1], got {rho}")));
            }
        }
        if self.hidden1 == 0 || self.hidden2 == 0 {
            return Err(config_err("hidden layer widths must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate < 1.0) {
            return Err(config_err("learning_rate must lie in (0, 1)"));
        }
        if !(self.lr_decay_factor > 0.0 && self.lr_decay_factor <= 1.0) {
            return Err(config_err("lr_decay_factor must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn lr_schedule(&self) -> LrSchedule {
        LrSchedule {
            initial: self.learning_rate,
            factor: self.lr_decay_factor,
            every: self.lr_decay_every,
        }
    }
}
