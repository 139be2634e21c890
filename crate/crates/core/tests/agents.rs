use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swipt_rl::agents::{
    train_episode, AgentConfig, Algorithm, Controller, DqnAgent, Exploration, ReplayBuffer, Transition,
    UcbStats,
};
use swipt_rl::env::{EnvConfig, Environment};
use swipt_rl::neural::QFunction;
use swipt_rl::{stream_rng, Features};

fn small(algorithm: Algorithm, exploration: Exploration) -> AgentConfig {
    AgentConfig { algorithm, exploration, hidden1: 16, hidden2: 8, ..AgentConfig::default() }
}

fn params<Q: QFunction>(net: &Q) -> Vec<f64> {
    net.layers()
        .iter()
        .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied().collect::<Vec<_>>())
        .collect()
}

// Upper 0.1% point of chi-square with 120 degrees of freedom.
const CHI2_120_999: f64 = 173.6;

#[test]
fn warmup_actions_are_uniform() {
    let env = EnvConfig::default();
    let mut agent = DqnAgent::new(AgentConfig::default(), &env, stream_rng(1, 1)).unwrap();
    let n = 121_000;
    let mut counts = [0f64; 121];
    for _ in 0..n {
        counts[agent.act(&[0.0; 6]).unwrap()] += 1.0;
    }
    let expected = n as f64 / 121.0;
    let chi2: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
    assert!(chi2 < CHI2_120_999, "chi2 {chi2}");
}

#[test]
fn first_update_lands_in_episode_twelve() {
    let env_cfg = EnvConfig::default();
    let mut env = Environment::with_rng(env_cfg.clone(), stream_rng(2, 0)).unwrap();
    let mut agent = DqnAgent::new(small(Algorithm::Ddqn, Exploration::Ucb), &env_cfg, stream_rng(2, 1)).unwrap();
    let cfg = agent.config().clone();
    let first = cfg.learning_starts.div_ceil(env_cfg.num_slots);
    assert_eq!(first, 12);
    for episode in 1..=first {
        let m = train_episode(&mut agent, &mut env, episode).unwrap();
        if episode < first {
            assert_eq!(m.updates, 0, "episode {episode}");
        } else {
            let expected = first * env_cfg.num_slots - cfg.learning_starts + 1;
            assert_eq!(m.updates as usize, expected);
        }
    }
}

#[test]
fn dqn_and_ddqn_agree_until_learning_starts() {
    let env_cfg = EnvConfig::default();
    let run = |algorithm| {
        let mut env = Environment::with_rng(env_cfg.clone(), stream_rng(3, 0)).unwrap();
        let mut agent = DqnAgent::new(small(algorithm, Exploration::Ucb), &env_cfg, stream_rng(3, 1)).unwrap();
        let metrics: Vec<_> = (1..=11).map(|e| train_episode(&mut agent, &mut env, e).unwrap()).collect();
        (metrics, params(agent.online()), agent.ucb().clone())
    };
    assert_eq!(run(Algorithm::Ddqn), run(Algorithm::Dqn));
}

#[test]
fn ucb_counts_every_step_across_episodes() {
    let env_cfg = EnvConfig::default();
    let mut env = Environment::with_rng(env_cfg.clone(), stream_rng(4, 0)).unwrap();
    let mut agent = DqnAgent::new(small(Algorithm::Ddqn, Exploration::Ucb), &env_cfg, stream_rng(4, 1)).unwrap();
    let mut sums = vec![0.0; 121];
    let mut counts = vec![0u64; 121];
    for episode in 1..=15 {
        let m = train_episode(&mut agent, &mut env, episode).unwrap();
        for s in &m.steps {
            sums[s.action] += s.reward;
            counts[s.action] += 1;
        }
    }
    let ucb = agent.ucb();
    assert_eq!(ucb.total(), 15 * 30);
    assert_eq!(ucb.clock(), 15 * 30 + 1);
    assert_eq!(ucb.counts(), &counts[..]);
    let t = ucb.clock() as f64;
    for a in 0..121 {
        let expected = if counts[a] == 0 {
            f64::INFINITY
        } else {
            sums[a] / counts[a] as f64 + (2.5 * t.ln() / counts[a] as f64).sqrt()
        };
        let got = ucb.upper_bound(a);
        assert!(got == expected || (got - expected).abs() < 1e-12, "action {a}: {got} vs {expected}");
    }
}

#[test]
fn untried_action_wins_over_any_q() {
    let mut stats = UcbStats::new(4, 2.5);
    for a in [0, 1, 3] {
        stats.record(a, 100.0);
    }
    let adjusted = stats.adjust(&[1e9, 1e9, -1e9, 1e9]);
    assert_eq!(swipt_rl::agents::argmax(&adjusted), 2);
}

#[test]
fn replay_sampling_is_uniform() {
    let mut buffer = ReplayBuffer::new(50, 50).unwrap();
    for i in 0..50 {
        buffer.push(Transition {
            state: [i as f64; 6],
            action: i,
            reward: 0.0,
            next_state: [0.0; 6],
            terminal: false,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut counts = [0f64; 50];
    let draws = 100_000;
    for _ in 0..draws / 10 {
        for i in buffer.sample_indices(&mut rng, 10).unwrap() {
            counts[i] += 1.0;
        }
    }
    let total: f64 = counts.iter().sum();
    let expected = total / 50.0;
    let chi2: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
    // Upper 0.1% point of chi-square with 49 degrees of freedom.
    assert!(chi2 < 85.4, "chi2 {chi2}");
}

#[test]
fn replay_ring_drops_oldest() {
    let mut buffer = ReplayBuffer::new(10, 1).unwrap();
    for i in 0..25 {
        buffer.push(Transition {
            state: [0.0; 6],
            action: i,
            reward: i as f64,
            next_state: [0.0; 6],
            terminal: false,
        });
    }
    assert_eq!(buffer.len(), 10);
    let mut kept: Vec<usize> = (0..10).map(|i| buffer.get(i).unwrap().action).collect();
    kept.sort();
    assert_eq!(kept, (15..25).collect::<Vec<_>>());
}

#[test]
fn target_network_only_moves_on_sync() {
    let env_cfg = EnvConfig::default();
    let mut env = Environment::with_rng(env_cfg.clone(), stream_rng(6, 0)).unwrap();
    let cfg = AgentConfig { target_sync_every: 50, learning_starts: 100, batch_size: 16, ..small(Algorithm::Ddqn, Exploration::Ucb) };
    let mut agent = DqnAgent::new(cfg, &env_cfg, stream_rng(6, 1)).unwrap();
    let mut synced = params(agent.target());
    let mut syncs = 0;
    for episode in 1..=12 {
        agent.begin_episode(episode).unwrap();
        let mut state = env.reset();
        loop {
            let f: Features = swipt_rl::env::normalize(&state, &env_cfg);
            let a = agent.act(&f).unwrap();
            let r = env.step(&agent.action_space().decode(a).unwrap()).unwrap();
            agent
                .observe(Transition {
                    state: f,
                    action: a,
                    reward: r.reward,
                    next_state: swipt_rl::env::normalize(&r.next_state, &env_cfg),
                    terminal: r.terminal,
                })
                .unwrap();
            let steps = agent.gradient_steps();
            if steps > 0 && steps % 50 == 0 && params(agent.target()) != synced {
                assert_eq!(params(agent.target()), params(agent.online()));
                synced = params(agent.target());
                syncs += 1;
            } else {
                assert_eq!(params(agent.target()), synced, "target moved at gradient step {steps}");
            }
            if r.terminal {
                break;
            }
            state = r.next_state;
        }
        agent.end_episode();
    }
    assert_eq!(syncs as u64, agent.gradient_steps() / 50);
    assert!(syncs >= 4);
}

#[test]
fn epsilon_decays_per_episode_to_its_floor() {
    let env_cfg = EnvConfig::default();
    let mut agent = DqnAgent::new(small(Algorithm::Ddqn, Exploration::EpsilonGreedy), &env_cfg, stream_rng(7, 1)).unwrap();
    for n in 1..=3000 {
        agent.end_episode();
        let expected = 0.998f64.powi(n).max(0.01);
        assert!((agent.epsilon() - expected).abs() < 1e-12);
    }
    let mut ucb = DqnAgent::new(small(Algorithm::Ddqn, Exploration::Ucb), &env_cfg, stream_rng(7, 1)).unwrap();
    ucb.end_episode();
    assert_eq!(ucb.epsilon(), 1.0);
}

#[test]
fn learning_rate_halves_every_500_episodes() {
    let env_cfg = EnvConfig::default();
    let mut agent = DqnAgent::new(small(Algorithm::Ddqn, Exploration::Ucb), &env_cfg, stream_rng(8, 1)).unwrap();
    for (episode, lr) in [(1, 2e-4), (500, 2e-4), (501, 1e-4), (1001, 5e-5), (2500, 1.25e-5)] {
        agent.begin_episode(episode).unwrap();
        assert!((agent.learning_rate() - lr).abs() < 1e-18, "episode {episode}");
    }
}

#[test]
fn fixed_rho_learner_only_varies_power() {
    let env_cfg = EnvConfig::default();
    let cfg = AgentConfig { fixed_rho: Some(0.5), ..small(Algorithm::Ddqn, Exploration::Ucb) };
    let agent = DqnAgent::new(cfg, &env_cfg, stream_rng(9, 1)).unwrap();
    let space = agent.action_space();
    assert_eq!(space.len(), 11);
    assert!((0..11).all(|i| space.decode(i).unwrap().rho == 0.5));
}

#[test]
fn checkpoint_round_trip() {
    let env_cfg = EnvConfig::default();
    let cfg = small(Algorithm::D3qn, Exploration::EpsilonGreedy);
    let mut env = Environment::with_rng(env_cfg.clone(), stream_rng(10, 0)).unwrap();
    let mut agent = DqnAgent::new(cfg.clone(), &env_cfg, stream_rng(10, 1)).unwrap();
    for episode in 1..=14 {
        train_episode(&mut agent, &mut env, episode).unwrap();
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ckpt.json");
    let ckpt = agent.checkpoint();
    ckpt.save(&path).unwrap();

    let text = std::fs::read_to_string(&path).unwrap();
    for key in ["\"format\"", "\"layer_dims\"", "\"adam\"", "\"ucb\"", "\"config_hash\"", "\"rng\""] {
        assert!(text.contains(key), "missing {key}");
    }
    assert!(!text.contains("buffer"));

    let loaded = swipt_rl::agents::Checkpoint::load(&path).unwrap();
    assert_eq!(loaded, ckpt);
    let restored = DqnAgent::restore(cfg.clone(), &env_cfg, loaded.clone()).unwrap();
    assert_eq!(restored.checkpoint(), ckpt);
    assert!(restored.buffer().is_empty());
    let probe: Features = [0.3, 0.5, 1.0, 0.1, 0.2, 0.4];
    assert_eq!(restored.greedy(&probe).unwrap(), agent.greedy(&probe).unwrap());

    let other = AgentConfig { gamma: 0.9, ..cfg };
    assert!(DqnAgent::restore(other, &env_cfg, loaded).is_err());
}

#[test]
fn learner_outscores_random_after_short_training() {
    // A smoke check on the whole loop, far from converged.
    let env_cfg = EnvConfig::default();
    let mut env = Environment::with_rng(env_cfg.clone(), stream_rng(11, 0)).unwrap();
    let cfg = AgentConfig { hidden1: 64, hidden2: 32, ..AgentConfig::default() };
    let mut agent = DqnAgent::new(cfg, &env_cfg, stream_rng(11, 1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut renv = Environment::with_rng(env_cfg.clone(), stream_rng(11, 0)).unwrap();
    let space = renv.action_space();
    let (mut learned, mut random) = (0.0, 0.0);
    for episode in 1..=200 {
        let m = train_episode(&mut agent, &mut env, episode).unwrap();
        renv.reset();
        let mut total = 0.0;
        loop {
            let r = renv.step(&space.decode(rng.random_range(0..space.len())).unwrap()).unwrap();
            total += r.reward;
            if r.terminal {
                break;
            }
        }
        if episode > 150 {
            learned += m.total_reward;
            random += total;
        }
    }
    assert!(learned > random, "{learned} vs {random}");
}
