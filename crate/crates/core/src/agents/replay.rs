use ndarray::Array2;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{Features, FEATURE_DIM};

/// One stored experience `(s, a, r, s', terminal)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub state: Features,
    pub action: usize,
    pub reward: f64,
    pub next_state: Features,
    pub terminal: bool,
}

/// Fixed-capacity ring of transitions with a learning-start threshold.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    threshold: usize,
    items: Vec<Transition>,
    next: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, threshold: usize) -> Result<Self> {
        if capacity == 0 || threshold > capacity {
            return Err(Error::Config(format!(
                "replay threshold {threshold} must not exceed capacity {capacity}"
            )));
        }
        Ok(Self {
            capacity,
            threshold,
            items: Vec::with_capacity(capacity.min(1 << 16)),
            next: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Whether enough experience has accumulated to sample minibatches.
    pub fn ready(&self) -> bool {
        self.items.len() >= self.threshold
    }

    /// Stores `t`, overwriting the oldest entry once full.
    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.next] = t;
        }
        self.next = (self.next + 1) % self.capacity;
    }

    pub fn get(&self, i: usize) -> Option<&Transition> {
        self.items.get(i)
    }

    /// `n` distinct slot indices drawn uniformly.
    pub fn sample_indices<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Vec<usize>> {
        if !self.ready() {
            return Err(Error::Usage(format!(
                "buffer holds {} transitions, below the threshold {}",
                self.items.len(),
                self.threshold
            )));
        }
        if n == 0 || n > self.items.len() {
            return Err(Error::Usage(format!(
                "cannot draw {n} distinct transitions from {}",
                self.items.len()
            )));
        }
        Ok(index::sample(rng, self.items.len(), n).into_vec())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Minibatch> {
        let idx = self.sample_indices(rng, n)?;
        Ok(Minibatch::from_transitions(idx.iter().map(|&i| &self.items[i])))
    }
}

/// Column-stacked minibatch ready for the networks.
#[derive(Debug, Clone, PartialEq)]
pub struct Minibatch {
    pub states: Array2<f64>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    pub next_states: Array2<f64>,
    pub terminals: Vec<bool>,
}

impl Minibatch {
    pub fn from_transitions<'a, I>(items: I) -> Self
    where
        I: IntoIterator<Item = &'a Transition>,
    {
        let items: Vec<&Transition> = items.into_iter().collect();
        let n = items.len();
        let mut states = Array2::zeros((n, FEATURE_DIM));
        let mut next_states = Array2::zeros((n, FEATURE_DIM));
        for (i, t) in items.iter().enumerate() {
            states.row_mut(i).assign(&ndarray::aview1(&t.state));
            next_states.row_mut(i).assign(&ndarray::aview1(&t.next_state));
        }
        Self {
            states,
            actions: items.iter().map(|t| t.action).collect(),
            rewards: items.iter().map(|t| t.reward).collect(),
            next_states,
            terminals: items.iter().map(|t| t.terminal).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream_rng;

    fn transition(i: usize) -> Transition {
        Transition {
            state: [i as f64; FEATURE_DIM],
            action: i % 7,
            reward: i as f64,
            next_state: [i as f64 + 1.0; FEATURE_DIM],
            terminal: i % 30 == 29,
        }
    }

    #[test]
    fn ring_overwrites_oldest() {
        let mut buf = ReplayBuffer::new(4, 2).unwrap();
        for i in 0..6 {
            buf.push(transition(i));
        }
        assert_eq!(buf.len(), 4);
        let rewards: Vec<f64> = (0..4).map(|i| buf.get(i).unwrap().reward).collect();
        assert_eq!(rewards, vec![4.0, 5.0, 2.0, 3.0]);
    }

    #[test]
    fn sampling_waits_for_threshold() {
        let mut rng = stream_rng(1, 0);
        let mut buf = ReplayBuffer::new(10, 3).unwrap();
        buf.push(transition(0));
        buf.push(transition(1));
        assert!(buf.sample(&mut rng, 2).is_err());
        buf.push(transition(2));
        let b = buf.sample(&mut rng, 3).unwrap();
        let mut seen = b.rewards.clone();
        seen.sort_by(f64::total_cmp);
        assert_eq!(seen, vec![0.0, 1.0, 2.0]);
        assert!(buf.sample(&mut rng, 4).is_err());
        assert!(ReplayBuffer::new(3, 4).is_err());
    }

    #[test]
    fn minibatch_layout() {
        let items: Vec<Transition> = (0..3).map(transition).collect();
        let b = Minibatch::from_transitions(&items);
        assert_eq!(b.states.dim(), (3, FEATURE_DIM));
        assert_eq!(b.states[[2, 5]], 2.0);
        assert_eq!(b.next_states[[1, 0]], 2.0);
        assert_eq!(b.actions, vec![0, 1, 2]);
    }
}
