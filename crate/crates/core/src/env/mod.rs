//! The slotted SWIPT energy-harvesting cognitive IoT environment.
//!
//! Each episode has `num_slots` slots of `tau` seconds. In every slot the
//! transmitter picks a time-switching factor `rho` (fraction of the slot spent
//! harvesting) and a transmit power. The environment samples Rayleigh channel
//! power gains, Gamma-distributed ambient energy and the primary user's
//! occupancy pattern, then scores the action with the achievable rate or the
//! constraint-violation penalty.

mod channel;
mod config;
mod sim;
mod state;

pub use channel::{rate, sample_energy, sample_gain, sample_pu_schedule};
pub use config::{EnvConfig, RewardMode};
pub use sim::{normalize, Environment};
pub use state::{Action, ActionSpace, EnvState, StepResult};
