use std::fs;
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::UcbStats;
use crate::error::Result;
use crate::neural::{Adam, QNetwork};

pub const CHECKPOINT_FORMAT: &str = "swipt-rl/checkpoint/v1";

/// Self-describing JSON snapshot of a learner: both networks, optimizer
/// moments, UCB statistics, exploration state, random stream position and the
/// fingerprint of the configuration it was trained under. Replay memory is
/// not included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub config_hash: String,
    pub layer_dims: Vec<(usize, usize)>,
    pub online: QNetwork,
    pub target: QNetwork,
    pub adam: Adam,
    pub ucb: UcbStats,
    pub epsilon: f64,
    pub gradient_steps: u64,
    pub episode: usize,
    pub rng: ChaCha8Rng,
}

impl Checkpoint {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_vec(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }
}
