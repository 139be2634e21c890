//! Learners and policies that drive the environment.
//!
//! [`DqnAgent`] covers every value-based learner in the comparison: the
//! double DQN with UCB-adjusted selection, vanilla DQN, dueling double DQN
//! and the power-only learner with a pinned time-switching factor, each with
//! UCB or epsilon-greedy exploration. [`RandomPolicy`] is the uniform
//! baseline. Both implement [`Controller`], which [`train_episode`] drives.

mod checkpoint;
mod config;
mod episode;
mod learner;
mod random;
mod replay;
mod targets;
mod ucb;

pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT};
pub use config::{AgentConfig, Algorithm, Exploration};
pub use episode::{train_episode, Controller, EpisodeMetrics, StepLog};
pub use learner::DqnAgent;
pub use random::RandomPolicy;
pub use replay::{Minibatch, ReplayBuffer, Transition};
pub use targets::{double_q_targets, vanilla_q_targets};
pub use ucb::{exploration_bonus, UcbStats};

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::argmax;

    #[test]
    fn argmax_prefers_lowest_index_on_ties() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), 1);
        assert_eq!(argmax(&[f64::INFINITY, f64::INFINITY]), 0);
        assert_eq!(argmax(&[-1.0]), 0);
    }
}
