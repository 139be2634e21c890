use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

/// How the per-slot reward scales with the slot duration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    /// `(1 - rho) * R`: the per-slot reward ignores `tau`.
    Rate,
    /// `(1 - rho) * tau * R`: bits per Hz delivered in the slot. Identical to
    /// [`RewardMode::Rate`] when `tau = 1`.
    #[default]
    Throughput,
}

/// Physical and protocol constants of the environment.
///
/// Energies are in watt-seconds, powers in watts, distances in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    /// Slot duration in seconds.
    pub tau: f64,
    /// Slots per episode.
    pub num_slots: usize,
    /// Number of slots per episode occupied by the primary user.
    pub pu_slots: usize,
    pub pu_power: f64,
    pub interference_threshold: f64,
    pub noise_variance: f64,
    pub pathloss_alpha: f64,
    /// Secondary transmitter to secondary receiver.
    pub d_ss: f64,
    /// Secondary transmitter to primary receiver.
    pub d_sp: f64,
    /// Primary transmitter to secondary receiver.
    pub d_ps: f64,
    pub battery_max: f64,
    pub battery_init: f64,
    pub gamma_shape: f64,
    pub gamma_scale: f64,
    /// Energy conversion efficiency in `[0, 1]`.
    pub conversion_mu: f64,
    /// Magnitude of the constraint-violation penalty.
    pub penalty: f64,
    pub rho_grid: Vec<f64>,
    pub power_grid: Vec<f64>,
    pub reward_mode: RewardMode,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            tau: 1.0,
            num_slots: 30,
            pu_slots: 18,
            pu_power: 0.2,
            interference_threshold: 0.1,
            noise_variance: 1e-3,
            pathloss_alpha: 4.0,
            d_ss: 1.5,
            d_sp: 1.8,
            d_ps: 1.8,
            battery_max: 0.5,
            battery_init: 0.0,
            gamma_shape: 0.5,
            gamma_scale: 1.0,
            conversion_mu: 0.9,
            penalty: 7.0,
            rho_grid: (0..=10).map(|i| i as f64 / 10.0).collect(),
            power_grid: (0..=10).map(|i| i as f64 / 100.0).collect(),
            reward_mode: RewardMode::default(),
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(config_err(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("tau", self.tau)?;
        positive("noise_variance", self.noise_variance)?;
        positive("pathloss_alpha", self.pathloss_alpha)?;
        positive("d_ss", self.d_ss)?;
        positive("d_sp", self.d_sp)?;
        positive("d_ps", self.d_ps)?;
        positive("battery_max", self.battery_max)?;
        positive("gamma_shape", self.gamma_shape)?;
        positive("gamma_scale", self.gamma_scale)?;
        // Zero is allowed so penalty-free runs can be studied.
        if !(self.penalty >= 0.0 && self.penalty.is_finite()) {
            return Err(config_err(format!("penalty must be non-negative and finite, got {}", self.penalty)));
        }
        if self.num_slots == 0 {
            return Err(config_err("num_slots must be at least 1"));
        }
        if self.pu_slots > self.num_slots {
            return Err(config_err(format!(
                "pu_slots ({}) exceeds num_slots ({})",
                self.pu_slots, self.num_slots
            )));
        }
        if !(self.pu_power >= 0.0 && self.pu_power.is_finite()) {
            return Err(config_err("pu_power must be non-negative"));
        }
        if !(self.interference_threshold >= 0.0) {
            return Err(config_err("interference_threshold must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.conversion_mu) {
            return Err(config_err("conversion_mu must lie in [0, 1]"));
        }
        if !(0.0..=self.battery_max).contains(&self.battery_init) {
            return Err(config_err(format!(
                "battery_init ({}) must lie in [0, battery_max = {}]",
                self.battery_init, self.battery_max
            )));
        }
        if self.rho_grid.is_empty() || self.power_grid.is_empty() {
            return Err(config_err("action grids must be non-empty"));
        }
        if self.rho_grid.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(config_err("every rho in rho_grid must lie in [0, 1]"));
        }
        if self.power_grid.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(config_err("every power in power_grid must be non-negative"));
        }
        Ok(())
    }

    /// Size of the joint `rho x power` action set.
    pub fn action_count(&self) -> usize {
        self.rho_grid.len() * self.power_grid.len()
    }

    /// Mean channel power gain for a link of length `distance`.
    pub fn mean_gain(&self, distance: f64) -> f64 {
        distance.powf(-self.pathloss_alpha)
    }

    /// Mean harvested energy rate `mu * k * beta`.
    pub fn mean_energy(&self) -> f64 {
        self.conversion_mu * self.gamma_shape * self.gamma_scale
    }

    /// Ceiling applied to channel gains when normalizing observations.
    pub fn gain_ceiling(&self) -> f64 {
        10.0 * [self.d_ss, self.d_sp, self.d_ps]
            .iter()
            .map(|&d| self.mean_gain(d))
            .fold(f64::MIN, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grids_have_121_actions() {
        let c = EnvConfig::default();
        assert_eq!(c.rho_grid.len(), 11);
        assert_eq!(c.power_grid.len(), 11);
        assert_eq!(c.action_count(), 121);
        assert_eq!(c.rho_grid[3], 0.3);
        assert_eq!(c.power_grid[10], 0.1);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_invalid_fields() {
        let mut c = EnvConfig::default();
        c.pu_slots = 31;
        assert!(c.validate().is_err());

        let mut c = EnvConfig::default();
        c.d_sp = 0.0;
        assert!(c.validate().is_err());

        let mut c = EnvConfig::default();
        c.battery_init = 0.6;
        assert!(c.validate().is_err());

        let mut c = EnvConfig::default();
        c.conversion_mu = 1.2;
        assert!(c.validate().is_err());

        let mut c = EnvConfig::default();
        c.rho_grid.push(1.5);
        assert!(c.validate().is_err());

        let mut c = EnvConfig::default();
        c.noise_variance = 0.0;
        assert!(c.validate().is_err());

        let mut c = EnvConfig::default();
        c.penalty = -1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn gain_ceiling_uses_shortest_link() {
        let c = EnvConfig::default();
        assert!((c.gain_ceiling() - 10.0 * 1.5f64.powi(-4)).abs() < 1e-15);
    }
}
