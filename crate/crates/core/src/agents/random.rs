use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Controller, Transition};
use crate::env::ActionSpace;
use crate::error::Result;
use crate::Features;

/// Picks every action uniformly at random and never learns.
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    space: ActionSpace,
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(space: ActionSpace, rng: ChaCha8Rng) -> Self {
        Self { space, rng }
    }
}

impl Controller for RandomPolicy {
    fn action_space(&self) -> &ActionSpace {
        &self.space
    }

    fn act(&mut self, _features: &Features) -> Result<usize> {
        Ok(self.rng.random_range(0..self.space.len()))
    }

    fn observe(&mut self, _transition: Transition) -> Result<Option<f64>> {
        Ok(None)
    }
}
