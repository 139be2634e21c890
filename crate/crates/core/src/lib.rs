//! Joint time-switching and transmit-power control for a SWIPT energy-harvesting
//! cognitive IoT transmitter sharing spectrum with a primary user.
//!
//! The crate is split into four layers:
//!
//! - [`env`]: the slotted stochastic environment (fading, Gamma energy
//!   arrivals, primary-user occupancy, battery dynamics, rates and rewards).
//! - [`neural`]: dense Q-networks with hand-written backpropagation, the
//!   dueling variant, Adam and a step-decay learning-rate schedule.
//! - [`agents`]: the double-DQN learner with UCB-adjusted action selection,
//!   and the benchmark learners (DQN, dueling DDQN, fixed time-switching,
//!   epsilon-greedy variants, random).
//! - [`experiments`]: configuration, seeded orchestration, metrics, parameter
//!   sweeps, CSV output and charts.
//!
//! ```
//! use swipt_rl::env::{EnvConfig, Environment};
//!
//! let mut env = Environment::new(EnvConfig::default(), 7).unwrap();
//! let state = env.reset();
//! assert_eq!(state.slot, 1);
//! assert_eq!(state.prev_energy, 0.0);
//! ```

pub mod agents;
pub mod env;
mod error;
pub mod experiments;
pub mod neural;
mod util;

pub use error::{Error, Result};
pub use util::{fingerprint, stream_rng};

/// Number of features in an observation vector.
pub const FEATURE_DIM: usize = 6;

/// Normalized observation fed to the Q-networks.
pub type Features = [f64; FEATURE_DIM];

// Book chapters double as doctests so the guide cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/environment.md")]
    mod environment {}
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/agents.md")]
    mod agents {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
