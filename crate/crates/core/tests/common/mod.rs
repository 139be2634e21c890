//! Independent reference implementations shared by the integration and
//! acceptance tests. Nothing here calls into the library's own formulas.
#![allow(dead_code)]

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use swipt_rl::env::{EnvConfig, EnvState, RewardMode};
use swipt_rl::neural::{mse_loss_and_grad, Mlp, QFunction};

/// Reward and next battery for one slot, written out longhand.
pub fn oracle_step(cfg: &EnvConfig, s: &EnvState, rho: f64, power: f64, harvested: f64) -> (f64, f64) {
    let transmit_time = (1.0 - rho) * cfg.tau;
    let spent = power * transmit_time;
    let mut violated = spent > s.battery;
    if s.pu_active && power * s.gain_sp > cfg.interference_threshold {
        violated = true;
    }
    let reward = if violated {
        -cfg.penalty
    } else {
        let interference = if s.pu_active { cfg.pu_power * s.gain_ps } else { 0.0 };
        let sinr = power * s.gain_ss / (cfg.noise_variance + interference);
        let bits = (1.0 + sinr).log2();
        match cfg.reward_mode {
            RewardMode::Rate => (1.0 - rho) * bits,
            RewardMode::Throughput => transmit_time * bits,
        }
    };
    let mut battery = s.battery + rho * harvested * cfg.tau;
    if !violated {
        battery -= spent;
    }
    let battery = if battery < 0.0 {
        0.0
    } else if battery > cfg.battery_max {
        cfg.battery_max
    } else {
        battery
    };
    (reward, battery)
}

/// A state drawn without reference to the environment's own samplers.
pub fn random_state<R: Rng>(rng: &mut R, cfg: &EnvConfig) -> EnvState {
    EnvState {
        battery: rng.random::<f64>() * cfg.battery_max,
        prev_energy: rng.random::<f64>() * 2.0,
        pu_active: rng.random::<bool>(),
        gain_ps: -rng.random::<f64>().ln() * 0.1 + 1e-12,
        gain_sp: -rng.random::<f64>().ln() * 0.1 + 1e-12,
        gain_ss: -rng.random::<f64>().ln() * 0.2 + 1e-12,
        slot: rng.random_range(1..=cfg.num_slots),
    }
}

/// Largest `|analytic - numeric| / max(1, |analytic|)` over every parameter,
/// numeric gradients taken by central differences with step `h`.
pub fn max_gradient_error<Q: QFunction + Clone>(
    net: &Q,
    states: ArrayView2<f64>,
    actions: &[usize],
    targets: &[f64],
    h: f64,
) -> f64 {
    let (_, analytic) = mse_loss_and_grad(net, states, actions, targets).unwrap();
    let loss = |n: &Q| {
        let q = n.forward_batch(states).unwrap();
        actions
            .iter()
            .zip(targets)
            .enumerate()
            .map(|(i, (&a, &y))| (q[[i, a]] - y).powi(2))
            .sum::<f64>()
            / actions.len() as f64
    };
    let mut worst: f64 = 0.0;
    let layer_count = net.layers().len();
    for l in 0..layer_count {
        let (rows, cols) = net.layers()[l].weights.dim();
        for i in 0..rows {
            for j in 0..cols {
                let mut plus = net.clone();
                plus.layers_mut()[l].weights[[i, j]] += h;
                let mut minus = net.clone();
                minus.layers_mut()[l].weights[[i, j]] -= h;
                let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
                let a = analytic[l].weights[[i, j]];
                worst = worst.max((a - numeric).abs() / a.abs().max(1.0));
            }
        }
        for j in 0..net.layers()[l].bias.len() {
            let mut plus = net.clone();
            plus.layers_mut()[l].bias[j] += h;
            let mut minus = net.clone();
            minus.layers_mut()[l].bias[j] -= h;
            let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
            let a = analytic[l].bias[j];
            worst = worst.max((a - numeric).abs() / a.abs().max(1.0));
        }
    }
    worst
}

/// Random batch for gradient checks: inputs in [-1, 1], targets in [-2, 2].
pub fn random_batch<R: Rng>(rng: &mut R, n: usize, inputs: usize, outputs: usize) -> (Array2<f64>, Vec<usize>, Vec<f64>) {
    let states = Array2::from_shape_fn((n, inputs), |_| rng.random_range(-1.0..1.0));
    let actions = (0..n).map(|_| rng.random_range(0..outputs)).collect();
    let targets = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    (states, actions, targets)
}

/// Biases drawn away from zero so finite differences rarely straddle a ReLU kink.
pub fn random_mlp<R: Rng>(rng: &mut R, dims: &[usize]) -> Mlp {
    let mut net = Mlp::new(dims, rng).unwrap();
    for layer in net.layers_mut() {
        layer.bias.mapv_inplace(|_| rng.random_range(-0.5..0.5));
    }
    net
}
