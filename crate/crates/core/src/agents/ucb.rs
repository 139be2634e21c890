use serde::{Deserialize, Serialize};

/// Per-action statistics for upper-confidence-bound action selection.
///
/// For action `a` chosen `C_a` times with mean reward `r_a`, the bound at
/// global step `t` is `r_a + sqrt(c ln t / C_a)`. Untried actions get an
/// infinite bound. The clock counts environment steps across episodes and
/// starts at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcbStats {
    c: f64,
    counts: Vec<u64>,
    reward_sums: Vec<f64>,
    clock: u64,
}

impl UcbStats {
    pub fn new(actions: usize, c: f64) -> Self {
        Self {
            c,
            counts: vec![0; actions],
            reward_sums: vec![0.0; actions],
            clock: 1,
        }
    }

    pub fn exploration_constant(&self) -> f64 {
        self.c
    }

    /// Global step index of the next decision.
    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Mean reward of `action` over the times it was chosen, 0 if never.
    pub fn mean_reward(&self, action: usize) -> f64 {
        match self.counts[action] {
            0 => 0.0,
            n => self.reward_sums[action] / n as f64,
        }
    }

    /// Exploration bonus `sqrt(c ln t / C_a)` alone.
    pub fn bonus(&self, action: usize) -> f64 {
        exploration_bonus(self.c, self.clock as f64, self.counts[action])
    }

    /// Expected-reward bound `r_a + sqrt(c ln t / C_a)`.
    pub fn upper_bound(&self, action: usize) -> f64 {
        self.mean_reward(action) + self.bonus(action)
    }

    /// Q-values shifted by each action's upper bound.
    pub fn adjust(&self, q: &[f64]) -> Vec<f64> {
        debug_assert_eq!(q.len(), self.counts.len());
        q.iter()
            .enumerate()
            .map(|(a, &v)| v + self.upper_bound(a))
            .collect()
    }

    /// Books the reward for `action` and advances the clock by one step.
    pub fn record(&mut self, action: usize, reward: f64) {
        self.counts[action] += 1;
        self.reward_sums[action] += reward;
        self.clock += 1;
    }

    /// Total number of recorded steps.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// `sqrt(c ln t / count)`, infinite for an untried action.
pub fn exploration_bonus(c: f64, t: f64, count: u64) -> f64 {
    if count == 0 {
        f64::INFINITY
    } else {
        (c * t.ln() / count as f64).sqrt()
    }
}
