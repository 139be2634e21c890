use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Observation at the start of a slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    /// Stored energy `B_t` in watt-seconds.
    pub battery: f64,
    /// Energy harvested in the previous slot, `e_{t-1}`.
    pub prev_energy: f64,
    /// Whether the primary user transmits in this slot.
    pub pu_active: bool,
    /// Primary transmitter to secondary receiver.
    pub gain_ps: f64,
    /// Secondary transmitter to primary receiver.
    pub gain_sp: f64,
    /// Secondary link.
    pub gain_ss: f64,
    /// 1-based slot index. Terminal successor states carry `num_slots + 1`.
    pub slot: usize,
}

/// A concrete decision: time-switching factor and transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub rho: f64,
    pub power: f64,
    /// Flat index into the [`ActionSpace`] that produced it.
    pub index: usize,
}

/// Discrete `rho x power` grid, flattened row-major with `rho` outer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSpace {
    rho_grid: Vec<f64>,
    power_grid: Vec<f64>,
}

impl ActionSpace {
    pub fn new(rho_grid: Vec<f64>, power_grid: Vec<f64>) -> Result<Self> {
        if rho_grid.is_empty() || power_grid.is_empty() {
            return Err(Error::Config("action grids must be non-empty".into()));
        }
        Ok(Self { rho_grid, power_grid })
    }

    pub fn len(&self) -> usize {
        self.rho_grid.len() * self.power_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rho_grid(&self) -> &[f64] {
        &self.rho_grid
    }

    pub fn power_grid(&self) -> &[f64] {
        &self.power_grid
    }

    pub fn encode(&self, rho_idx: usize, power_idx: usize) -> Result<usize> {
        if rho_idx >= self.rho_grid.len() || power_idx >= self.power_grid.len() {
            return Err(Error::Usage(format!(
                "grid position ({rho_idx}, {power_idx}) outside {}x{} grid",
                self.rho_grid.len(),
                self.power_grid.len()
            )));
        }
        Ok(rho_idx * self.power_grid.len() + power_idx)
    }

    pub fn decode(&self, index: usize) -> Result<Action> {
        if index >= self.len() {
            return Err(Error::Usage(format!(
                "action index {index} out of range for {} actions",
                self.len()
            )));
        }
        let n = self.power_grid.len();
        Ok(Action {
            rho: self.rho_grid[index / n],
            power: self.power_grid[index % n],
            index,
        })
    }
}

/// Outcome of one environment step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub reward: f64,
    pub next_state: EnvState,
    /// True exactly when the step consumed the final slot.
    pub terminal: bool,
    /// True when the action broke the battery or interference constraint.
    pub violated: bool,
    /// Energy harvested during the slot, `e_t`, before time switching.
    pub energy: f64,
    /// Transmit energy drawn from the battery (zero on violation).
    pub energy_used: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::EnvConfig;
    use proptest::prelude::*;

    fn space() -> ActionSpace {
        let c = EnvConfig::default();
        ActionSpace::new(c.rho_grid, c.power_grid).unwrap()
    }

    #[test]
    fn row_major_layout() {
        let s = space();
        let a = s.decode(0).unwrap();
        assert_eq!((a.rho, a.power), (0.0, 0.0));
        let a = s.decode(12).unwrap();
        assert_eq!((a.rho, a.power), (0.1, 0.01));
        let a = s.decode(120).unwrap();
        assert_eq!((a.rho, a.power), (1.0, 0.1));
        assert!(s.decode(121).is_err());
        assert!(s.encode(11, 0).is_err());
    }

    #[test]
    fn bijection_over_all_indices() {
        let s = space();
        for idx in 0..s.len() {
            let a = s.decode(idx).unwrap();
            let ri = s.rho_grid().iter().position(|&r| r == a.rho).unwrap();
            let pi = s.power_grid().iter().position(|&p| p == a.power).unwrap();
            assert_eq!(s.encode(ri, pi).unwrap(), idx);
        }
    }

    proptest! {
        #[test]
        fn encode_then_decode(ri in 0usize..11, pi in 0usize..11) {
            let s = space();
            let a = s.decode(s.encode(ri, pi).unwrap()).unwrap();
            prop_assert_eq!(a.rho, s.rho_grid()[ri]);
            prop_assert_eq!(a.power, s.power_grid()[pi]);
        }
    }
}
