use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    argmax, double_q_targets, vanilla_q_targets, AgentConfig, Algorithm, Checkpoint, Controller,
    Exploration, ReplayBuffer, Transition, UcbStats, CHECKPOINT_FORMAT,
};
use crate::env::{ActionSpace, EnvConfig};
use crate::error::{Error, Result};
use crate::neural::{mse_loss_and_grad, Adam, DuelingNet, Mlp, QFunction, QNetwork};
use crate::{fingerprint, Features, FEATURE_DIM};

/// Value-based learner with experience replay and a periodically synced
/// target network.
///
/// While the replay memory is below `learning_starts` it acts uniformly at
/// random; afterwards it acts greedily on UCB-adjusted Q-values or
/// epsilon-greedily, and performs one minibatch update per environment step.
#[derive(Debug, Clone)]
pub struct DqnAgent {
    config: AgentConfig,
    config_hash: String,
    space: ActionSpace,
    online: QNetwork,
    target: QNetwork,
    adam: Adam,
    buffer: ReplayBuffer,
    ucb: UcbStats,
    epsilon: f64,
    rng: ChaCha8Rng,
    gradient_steps: u64,
    episode: usize,
}

impl DqnAgent {
    pub fn new(config: AgentConfig, env: &EnvConfig, mut rng: ChaCha8Rng) -> Result<Self> {
        config.validate()?;
        env.validate()?;
        let space = match config.fixed_rho {
            Some(rho) => ActionSpace::new(vec![rho], env.power_grid.clone())?,
            None => ActionSpace::new(env.rho_grid.clone(), env.power_grid.clone())?,
        };
        let z = space.len();
        let online = match config.algorithm {
            Algorithm::Ddqn | Algorithm::Dqn => QNetwork::Dense(Mlp::new(
                &[FEATURE_DIM, config.hidden1, config.hidden2, z],
                &mut rng,
            )?),
            Algorithm::D3qn => QNetwork::Dueling(DuelingNet::new(
                FEATURE_DIM,
                config.hidden1,
                config.hidden2,
                z,
                &mut rng,
            )?),
        };
        let adam = Adam::new(&online, config.learning_rate)?;
        Ok(Self {
            config_hash: fingerprint(&(&config, env)),
            buffer: ReplayBuffer::new(config.buffer_capacity, config.learning_starts)?,
            ucb: UcbStats::new(z, config.ucb_c),
            epsilon: config.epsilon_initial,
            target: online.clone(),
            online,
            adam,
            space,
            rng,
            gradient_steps: 0,
            episode: 0,
            config,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn online(&self) -> &QNetwork {
        &self.online
    }

    pub fn target(&self) -> &QNetwork {
        &self.target
    }

    pub fn ucb(&self) -> &UcbStats {
        &self.ucb
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn learning_rate(&self) -> f64 {
        self.adam.learning_rate()
    }

    pub fn gradient_steps(&self) -> u64 {
        self.gradient_steps
    }

    /// Greedy action on raw Q-values, no exploration.
    pub fn greedy(&self, features: &Features) -> Result<usize> {
        Ok(argmax(&self.online.forward(features)?))
    }

    /// One minibatch update. Returns the loss.
    pub fn train_step(&mut self) -> Result<f64> {
        let batch = self.buffer.sample(&mut self.rng, self.config.batch_size)?;
        let gamma = self.config.gamma;
        let targets = match self.config.algorithm {
            Algorithm::Dqn => vanilla_q_targets(&batch, &self.target, gamma)?,
            Algorithm::Ddqn | Algorithm::D3qn => {
                double_q_targets(&batch, &self.online, &self.target, gamma)?
            }
        };
        let (loss, grads) =
            mse_loss_and_grad(&self.online, batch.states.view(), &batch.actions, &targets).map_err(
                |e| match e {
                    Error::Numeric(msg) => Error::Numeric(format!(
                        "{msg} (episode {}, gradient step {}, learning rate {})",
                        self.episode,
                        self.gradient_steps + 1,
                        self.adam.learning_rate()
                    )),
                    other => other,
                },
            )?;
        self.adam.step(&mut self.online, &grads)?;
        self.gradient_steps += 1;
        if self.gradient_steps % self.config.target_sync_every == 0 {
            self.target.copy_from(&self.online)?;
        }
        Ok(loss)
    }

    /// Snapshot of everything except the replay memory.
    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            config_hash: self.config_hash.clone(),
            layer_dims: self.online.layer_dims(),
            online: self.online.clone(),
            target: self.target.clone(),
            adam: self.adam.clone(),
            ucb: self.ucb.clone(),
            epsilon: self.epsilon,
            gradient_steps: self.gradient_steps,
            episode: self.episode,
            rng: self.rng.clone(),
        }
    }

    /// Rebuilds an agent from a checkpoint taken under the same configuration.
    /// The replay memory starts empty.
    pub fn restore(config: AgentConfig, env: &EnvConfig, checkpoint: Checkpoint) -> Result<Self> {
        if checkpoint.format != CHECKPOINT_FORMAT {
            return Err(Error::Checkpoint(format!("unknown format {:?}", checkpoint.format)));
        }
        let mut agent = Self::new(config, env, checkpoint.rng.clone())?;
        if agent.config_hash != checkpoint.config_hash {
            return Err(Error::Checkpoint(
                "checkpoint was written under a different configuration".into(),
            ));
        }
        if checkpoint.layer_dims != agent.online.layer_dims()
            || checkpoint.online.layer_dims() != checkpoint.layer_dims
            || checkpoint.target.layer_dims() != checkpoint.layer_dims
        {
            return Err(Error::Checkpoint("layer dimensions do not match".into()));
        }
        if checkpoint.ucb.counts().len() != agent.space.len() {
            return Err(Error::Checkpoint("UCB statistics do not match the action space".into()));
        }
        agent.online = checkpoint.online;
        agent.target = checkpoint.target;
        agent.adam = checkpoint.adam;
        agent.ucb = checkpoint.ucb;
        agent.epsilon = checkpoint.epsilon;
        agent.gradient_steps = checkpoint.gradient_steps;
        agent.episode = checkpoint.episode;
        agent.rng = checkpoint.rng;
        Ok(agent)
    }
}

impl Controller for DqnAgent {
    fn action_space(&self) -> &ActionSpace {
        &self.space
    }

    fn begin_episode(&mut self, episode: usize) -> Result<()> {
        self.episode = episode;
        self.config.lr_schedule().apply(&mut self.adam, episode)?;
        Ok(())
    }

    fn act(&mut self, features: &Features) -> Result<usize> {
        if !self.buffer.ready() {
            return Ok(self.rng.random_range(0..self.space.len()));
        }
        let q = self.online.forward(features)?;
        Ok(match self.config.exploration {
            Exploration::Ucb => argmax(&self.ucb.adjust(&q)),
            Exploration::EpsilonGreedy => {
                if self.rng.random::<f64>() < self.epsilon {
                    self.rng.random_range(0..self.space.len())
                } else {
                    argmax(&q)
                }
            }
        })
    }

    fn observe(&mut self, transition: Transition) -> Result<Option<f64>> {
        if transition.action >= self.space.len() {
            return Err(Error::Usage(format!("action {} out of range", transition.action)));
        }
        self.ucb.record(transition.action, transition.reward);
        self.buffer.push(transition);
        if self.buffer.ready() {
            self.train_step().map(Some)
        } else {
            Ok(None)
        }
    }

    fn end_episode(&mut self) {
        if self.config.exploration == Exploration::EpsilonGreedy {
            self.epsilon = (self.epsilon * self.config.epsilon_decay).max(self.config.epsilon_floor);
        }
    }
}
