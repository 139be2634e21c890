use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma};

use super::channel::{rate, sample_pu_schedule};
use super::{Action, ActionSpace, EnvConfig, EnvState, RewardMode, StepResult};
use crate::error::{config_err, Error, Result};
use crate::{Features, FEATURE_DIM};

/// Seeded simulator for one transmitter. Owns its random stream.
#[derive(Debug, Clone)]
pub struct Environment {
    config: EnvConfig,
    rng: ChaCha8Rng,
    gain_ss: Exp<f64>,
    gain_sp: Exp<f64>,
    gain_ps: Exp<f64>,
    energy: Gamma<f64>,
    schedule: Vec<bool>,
    state: Option<EnvState>,
}

impl Environment {
    pub fn new(config: EnvConfig, seed: u64) -> Result<Self> {
        Self::with_rng(config, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn with_rng(config: EnvConfig, rng: ChaCha8Rng) -> Result<Self> {
        config.validate()?;
        let exp = |d: f64| Exp::new(d.powf(config.pathloss_alpha)).map_err(|e| config_err(e.to_string()));
        Ok(Self {
            gain_ss: exp(config.d_ss)?,
            gain_sp: exp(config.d_sp)?,
            gain_ps: exp(config.d_ps)?,
            energy: Gamma::new(config.gamma_shape, config.gamma_scale)
                .map_err(|e| config_err(e.to_string()))?,
            schedule: vec![false; config.num_slots],
            state: None,
            rng,
            config,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    /// The joint `rho x power` grid from the configuration.
    pub fn action_space(&self) -> ActionSpace {
        ActionSpace::new(self.config.rho_grid.clone(), self.config.power_grid.clone())
            .expect("validated grids are non-empty")
    }

    /// Primary-user occupancy for the current episode.
    pub fn schedule(&self) -> &[bool] {
        &self.schedule
    }

    /// Current observation, if an episode is in progress.
    pub fn state(&self) -> Option<&EnvState> {
        self.state.as_ref()
    }

    /// Starts a new episode: battery back to `battery_init`, no prior harvest,
    /// fresh occupancy pattern and fresh gains for slot 1.
    pub fn reset(&mut self) -> EnvState {
        self.schedule =
            sample_pu_schedule(&mut self.rng, self.config.num_slots, self.config.pu_slots)
                .expect("validated pu_slots <= num_slots");
        let state = self.observe(self.config.battery_init, 0.0, 1);
        self.state = Some(state);
        state
    }

    /// Applies `action` to the current state and advances the episode.
    pub fn step(&mut self, action: &Action) -> Result<StepResult> {
        let state = self
            .state
            .ok_or_else(|| Error::Usage("step called before reset".into()))?;
        let result = self.step_from(&state, action)?;
        self.state = (!result.terminal).then_some(result.next_state);
        Ok(result)
    }

    /// Evaluates one transition from an arbitrary `state` using this
    /// environment's random stream and current occupancy pattern. Does not
    /// change the tracked episode state.
    pub fn step_from(&mut self, state: &EnvState, action: &Action) -> Result<StepResult> {
        let cfg = &self.config;
        if state.slot == 0 || state.slot > cfg.num_slots {
            return Err(Error::Usage(format!(
                "slot {} is outside the episode (1..={}); reset first",
                state.slot, cfg.num_slots
            )));
        }
        if !(0.0..=1.0).contains(&action.rho) || !(action.power >= 0.0) {
            return Err(Error::Usage(format!(
                "action (rho={}, power={}) is off the feasible range",
                action.rho, action.power
            )));
        }

        let tx_fraction = 1.0 - action.rho;
        let energy_use = action.power * tx_fraction * cfg.tau;
        let interferes = state.pu_active && action.power * state.gain_sp > cfg.interference_threshold;
        let violated = energy_use > state.battery || energy_use < 0.0 || interferes;

        let reward = if violated {
            -cfg.penalty
        } else {
            let r = rate(
                action.power,
                state.gain_ss,
                state.pu_active,
                cfg.pu_power,
                state.gain_ps,
                cfg.noise_variance,
            );
            match cfg.reward_mode {
                RewardMode::Rate => tx_fraction * r,
                RewardMode::Throughput => tx_fraction * cfg.tau * r,
            }
        };

        let energy = self.energy.sample(&mut self.rng) * cfg.conversion_mu;
        let energy_used = if violated { 0.0 } else { energy_use };
        let battery = (state.battery + action.rho * energy * cfg.tau - energy_used)
            .min(cfg.battery_max)
            .max(0.0);

        let terminal = state.slot == cfg.num_slots;
        let next_state = self.observe(battery, energy, state.slot + 1);
        Ok(StepResult {
            reward,
            next_state,
            terminal,
            violated,
            energy,
            energy_used,
        })
    }

    fn observe(&mut self, battery: f64, prev_energy: f64, slot: usize) -> EnvState {
        let pu_active = slot
            .checked_sub(1)
            .and_then(|i| self.schedule.get(i))
            .copied()
            .unwrap_or(false);
        EnvState {
            battery,
            prev_energy,
            pu_active,
            gain_ps: self.gain_ps.sample(&mut self.rng).max(f64::MIN_POSITIVE),
            gain_sp: self.gain_sp.sample(&mut self.rng).max(f64::MIN_POSITIVE),
            gain_ss: self.gain_ss.sample(&mut self.rng).max(f64::MIN_POSITIVE),
            slot,
        }
    }
}

/// Scales an observation into the network's input features.
///
/// Battery is divided by capacity, the previous harvest by its mean
/// `mu k beta`, and each gain is clipped at ten times the largest mean link
/// gain before dividing by that ceiling.
pub fn normalize(state: &EnvState, config: &EnvConfig) -> Features {
    let mean_energy = config.mean_energy();
    let ceiling = config.gain_ceiling();
    let gain = |g: f64| g.min(ceiling) / ceiling;
    let energy = if mean_energy > 0.0 {
        (state.prev_energy / mean_energy).min(10.0)
    } else {
        0.0
    };
    let features: Features = [
        state.battery / config.battery_max,
        energy,
        if state.pu_active { 1.0 } else { 0.0 },
        gain(state.gain_ps),
        gain(state.gain_sp),
        gain(state.gain_ss),
    ];
    debug_assert_eq!(features.len(), FEATURE_DIM);
    features
}
