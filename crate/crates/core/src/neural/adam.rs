use serde::{Deserialize, Serialize};

use super::{Dense, QFunction};
use crate::error::{config_err, Error, Result};

/// Adam optimizer with bias-corrected moment estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    learning_rate: f64,
    step: u64,
    first: Vec<Dense>,
    second: Vec<Dense>,
}

impl Adam {
    /// Zero moments shaped like `net`'s parameters, with the usual
    /// `beta1 = 0.9`, `beta2 = 0.999`, `epsilon = 1e-8`.
    pub fn new<Q: QFunction>(net: &Q, learning_rate: f64) -> Result<Self> {
        let zeros: Vec<Dense> = net
            .layers()
            .iter()
            .map(|l| {
                let (i, o) = l.shape();
                Dense::zeros(i, o)
            })
            .collect();
        let mut adam = Self {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            learning_rate: 0.0,
            step: 0,
            first: zeros.clone(),
            second: zeros,
        };
        adam.set_learning_rate(learning_rate)?;
        Ok(adam)
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn set_learning_rate(&mut self, learning_rate: f64) -> Result<()> {
        if !(learning_rate > 0.0 && learning_rate < 1.0) {
            return Err(config_err(format!(
                "learning rate must lie in (0, 1), got {learning_rate}"
            )));
        }
        self.learning_rate = learning_rate;
        Ok(())
    }

    /// Number of updates applied so far.
    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn moments(&self) -> (&[Dense], &[Dense]) {
        (&self.first, &self.second)
    }

    /// Applies one update `theta -= lr * m_hat / (sqrt(v_hat) + eps)`.
    pub fn step<Q: QFunction>(&mut self, net: &mut Q, grads: &[Dense]) -> Result<()> {
        let mut layers = net.layers_mut();
        if layers.len() != grads.len()
            || layers.len() != self.first.len()
            || layers.iter().zip(grads).any(|(l, g)| l.shape() != g.shape())
            || layers.iter().zip(&self.first).any(|(l, m)| l.shape() != m.shape())
        {
            return Err(Error::Usage("gradient shapes do not match the network".into()));
        }
        self.step += 1;
        let (b1, b2, eps, lr) = (self.beta1, self.beta2, self.epsilon, self.learning_rate);
        let c1 = 1.0 - b1.powf(self.step as f64);
        let c2 = 1.0 - b2.powf(self.step as f64);
        let update = |theta: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *theta -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        };
        for (((layer, g), m), v) in layers
            .iter_mut()
            .zip(grads)
            .zip(self.first.iter_mut())
            .zip(self.second.iter_mut())
        {
            ndarray::Zip::from(&mut layer.weights)
                .and(&mut m.weights)
                .and(&mut v.weights)
                .and(&g.weights)
                .for_each(|t, m, v, &g| update(t, m, v, g));
            ndarray::Zip::from(&mut layer.bias)
                .and(&mut m.bias)
                .and(&mut v.bias)
                .and(&g.bias)
                .for_each(|t, m, v, &g| update(t, m, v, g));
        }
        Ok(())
    }
}

/// Step-decay learning-rate schedule over 1-based episodes:
/// `initial * factor^floor((episode - 1) / every)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrSchedule {
    pub initial: f64,
    pub factor: f64,
    pub every: usize,
}

impl Default for LrSchedule {
    fn default() -> Self {
        Self { initial: 2e-4, factor: 0.5, every: 500 }
    }
}

impl LrSchedule {
    pub fn rate_at(&self, episode: usize) -> f64 {
        let decays = if self.every == 0 { 0 } else { episode.saturating_sub(1) / self.every };
        self.initial * self.factor.powi(decays as i32)
    }

    /// Sets `adam`'s learning rate for `episode` and returns it.
    pub fn apply(&self, adam: &mut Adam, episode: usize) -> Result<f64> {
        let rate = self.rate_at(episode);
        adam.set_learning_rate(rate)?;
        Ok(rate)
    }
}
