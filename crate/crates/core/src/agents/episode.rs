use serde::{Deserialize, Serialize};

use super::Transition;
use crate::env::{normalize, ActionSpace, Environment};
use crate::error::Result;
use crate::Features;

/// Anything that picks actions and learns from transitions.
pub trait Controller {
    /// The grid this controller's action indices refer to.
    fn action_space(&self) -> &ActionSpace;

    /// Called before the first step of `episode` (1-based).
    fn begin_episode(&mut self, _episode: usize) -> Result<()> {
        Ok(())
    }

    fn act(&mut self, features: &Features) -> Result<usize>;

    /// Books one transition. Returns the training loss when an update ran.
    fn observe(&mut self, transition: Transition) -> Result<Option<f64>>;

    fn end_episode(&mut self) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub slot: usize,
    pub action: usize,
    pub rho: f64,
    pub power: f64,
    pub reward: f64,
    pub violated: bool,
    pub battery: f64,
    pub loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub episode: usize,
    /// Sum of rewards over the episode.
    pub total_reward: f64,
    pub violations: u32,
    /// Gradient updates performed during the episode.
    pub updates: u32,
    pub steps: Vec<StepLog>,
}

/// Runs one full episode of `controller` against `env`.
pub fn train_episode<C: Controller + ?Sized>(
    controller: &mut C,
    env: &mut Environment,
    episode: usize,
) -> Result<EpisodeMetrics> {
    controller.begin_episode(episode)?;
    let mut state = env.reset();
    let mut metrics = EpisodeMetrics {
        episode,
        total_reward: 0.0,
        violations: 0,
        updates: 0,
        steps: Vec::with_capacity(env.config().num_slots),
    };
    loop {
        let features = normalize(&state, env.config());
        let index = controller.act(&features)?;
        let action = controller.action_space().decode(index)?;
        let result = env.step(&action)?;
        let loss = controller.observe(Transition {
            state: features,
            action: index,
            reward: result.reward,
            next_state: normalize(&result.next_state, env.config()),
            terminal: result.terminal,
        })?;

        metrics.total_reward += result.reward;
        metrics.violations += u32::from(result.violated);
        metrics.updates += u32::from(loss.is_some());
        metrics.steps.push(StepLog {
            slot: state.slot,
            action: index,
            rho: action.rho,
            power: action.power,
            reward: result.reward,
            violated: result.violated,
            battery: state.battery,
            loss,
        });
        if result.terminal {
            break;
        }
        state = result.next_state;
    }
    controller.end_episode();
    Ok(metrics)
}
