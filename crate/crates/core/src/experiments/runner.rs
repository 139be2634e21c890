use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::report::{render_dir, render_sweep_chart, write_series_csv, write_sweep_csv};
use super::{ExperimentConfig, MetricSeries, Strategy, SweepAxis, SweepRow};
use crate::agents::{train_episode, AgentConfig, Controller, DqnAgent, RandomPolicy};
use crate::env::{EnvConfig, Environment};
use crate::error::{Error, Result};
use crate::{fingerprint, stream_rng};

/// One training run. Fully determines its [`MetricSeries`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Job {
    pub label: String,
    pub strategy: Strategy,
    pub env: EnvConfig,
    pub agent: AgentConfig,
    pub episodes: usize,
    pub seed: u64,
    pub smoothing_window: usize,
}

impl Job {
    /// Cache key: everything but the label.
    fn key(&self) -> String {
        fingerprint(&(
            self.strategy,
            &self.env,
            &self.agent,
            self.episodes,
            self.seed,
            self.smoothing_window,
        ))
    }

    pub fn run(&self) -> Result<MetricSeries> {
        let mut env = Environment::with_rng(self.env.clone(), stream_rng(self.seed, 0))?;
        let controller_rng = stream_rng(self.seed, 1);
        let mut controller: Box<dyn Controller> = match self.strategy.agent_config(&self.agent) {
            None => Box::new(RandomPolicy::new(env.action_space(), controller_rng)),
            Some(agent) => Box::new(DqnAgent::new(agent, &self.env, controller_rng)?),
        };
        let mut returns = Vec::with_capacity(self.episodes);
        let mut violations = Vec::with_capacity(self.episodes);
        for episode in 1..=self.episodes {
            let m = train_episode(controller.as_mut(), &mut env, episode)?;
            returns.push(m.total_reward);
            violations.push(m.violations);
        }
        Ok(MetricSeries::new(
            self.label.clone(),
            self.seed,
            returns,
            violations,
            self.smoothing_window,
        ))
    }
}

/// Executes jobs in parallel, remembering finished runs so repeated
/// configurations (a sweep's default point, say) train only once.
#[derive(Debug, Default)]
pub struct Runner {
    cache: HashMap<String, MetricSeries>,
}

impl Runner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Series for every job, in job order.
    pub fn run(&mut self, jobs: &[Job]) -> Result<Vec<MetricSeries>> {
        let keys: Vec<String> = jobs.iter().map(Job::key).collect();
        let mut pending: Vec<usize> = Vec::new();
        for (i, k) in keys.iter().enumerate() {
            if !self.cache.contains_key(k) && !pending.iter().any(|&j| keys[j] == *k) {
                pending.push(i);
            }
        }
        let fresh: Vec<(usize, MetricSeries)> = pending
            .par_iter()
            .map(|&i| jobs[i].run().map(|s| (i, s)))
            .collect::<Result<_>>()?;
        for (i, series) in fresh {
            self.cache.insert(keys[i].clone(), series);
        }
        Ok(jobs
            .iter()
            .zip(&keys)
            .map(|(job, k)| {
                let mut s = self.cache[k].clone();
                s.label = job.label.clone();
                s
            })
            .collect())
    }
}

/// Where an experiment's files went and what it produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub dir: PathBuf,
    pub chart: PathBuf,
    pub series: Vec<MetricSeries>,
}

/// Trains every configured strategy under every seed, writes one CSV per
/// series into `<output_dir>/compare-<hash>/` and renders the comparison
/// chart from those files.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let dir = prepare_dir(&config.output_dir, &format!("compare-{}", config.short_hash()))?;
    let jobs: Vec<Job> = config
        .strategies
        .iter()
        .flat_map(|&strategy| {
            config.seeds.iter().map(move |&seed| Job {
                label: strategy.name().to_string(),
                strategy,
                env: config.env.clone(),
                agent: config.agent.clone(),
                episodes: config.episodes,
                seed,
                smoothing_window: config.smoothing_window,
            })
        })
        .collect();
    let series = Runner::new().run(&jobs)?;
    finish(dir, series, &format!("ASR by strategy [{}]", config.short_hash()))
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub dir: PathBuf,
    pub chart: PathBuf,
    pub table_path: PathBuf,
    pub table_chart: PathBuf,
    pub rows: Vec<SweepRow>,
    pub series: Vec<MetricSeries>,
}

/// Trains `strategy` once per `(value, seed)` with `axis` set to each value
/// and tabulates the final-window ASR.
pub fn sweep(
    config: &ExperimentConfig,
    strategy: Strategy,
    axis: SweepAxis,
    values: &[f64],
    runner: &mut Runner,
) -> Result<SweepOutput> {
    config.validate()?;
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let envs: Vec<EnvConfig> = values
        .iter()
        .map(|&v| axis.apply(&config.env, v))
        .collect::<Result<_>>()?;
    let tag = format!("sweep-{}-{}-{}", axis.name(), strategy.name(), config.short_hash());
    let dir = prepare_dir(&config.output_dir, &tag)?;

    let mut jobs = Vec::new();
    for (env, &value) in envs.iter().zip(values) {
        for &seed in &config.seeds {
            jobs.push(Job {
                label: format!("{}={value}", axis.name()),
                strategy,
                env: env.clone(),
                agent: config.agent.clone(),
                episodes: config.episodes,
                seed,
                smoothing_window: config.smoothing_window,
            });
        }
    }
    let series = runner.run(&jobs)?;
    let rows: Vec<SweepRow> = values
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let n = config.seeds.len();
            let finals: Vec<f64> = series[i * n..(i + 1) * n]
                .iter()
                .map(|s| s.final_asr(config.final_window))
                .collect();
            SweepRow::from_finals(value, &finals)
        })
        .collect();
    let table_path = dir.join(format!("sweep_{}.csv", axis.name()));
    write_sweep_csv(&table_path, &rows)?;
    let table_chart = dir.join(format!("sweep_{}.png", axis.name()));
    render_sweep_chart(
        &rows,
        axis.name(),
        &table_chart,
        &format!("final ASR over {} [{}]", axis.name(), config.short_hash()),
    )?;
    let out = finish(dir, series, &format!("ASR over {} [{}]", axis.name(), config.short_hash()))?;
    Ok(SweepOutput {
        dir: out.dir,
        chart: out.chart,
        table_path,
        table_chart,
        rows,
        series: out.series,
    })
}

/// Trains a single learner and hands it back with its curve, e.g. to
/// checkpoint it.
pub fn train_agent(
    env_config: &EnvConfig,
    agent_config: &AgentConfig,
    episodes: usize,
    seed: u64,
    smoothing_window: usize,
) -> Result<(DqnAgent, MetricSeries)> {
    let mut env = Environment::with_rng(env_config.clone(), stream_rng(seed, 0))?;
    let mut agent = DqnAgent::new(agent_config.clone(), env_config, stream_rng(seed, 1))?;
    let mut returns = Vec::with_capacity(episodes);
    let mut violations = Vec::with_capacity(episodes);
    for episode in 1..=episodes {
        let m = train_episode(&mut agent, &mut env, episode)?;
        returns.push(m.total_reward);
        violations.push(m.violations);
    }
    let label = format!("{:?}", agent_config.algorithm).to_lowercase();
    Ok((agent, MetricSeries::new(label, seed, returns, violations, smoothing_window)))
}

/// Creates `root/name` and checks it is writable before any training starts.
fn prepare_dir(root: &Path, name: &str) -> Result<PathBuf> {
    let dir = root.join(name);
    fs::create_dir_all(&dir).map_err(|e| {
        Error::Config(format!("output directory {} is not usable: {e}", dir.display()))
    })?;
    let probe = dir.join(".write-check");
    fs::write(&probe, b"").map_err(|e| {
        Error::Config(format!("output directory {} is not writable: {e}", dir.display()))
    })?;
    fs::remove_file(probe)?;
    Ok(dir)
}

fn finish(dir: PathBuf, series: Vec<MetricSeries>, title: &str) -> Result<ExperimentOutput> {
    for s in &series {
        write_series_csv(dir.join(format!("{}_seed{}.csv", s.label, s.seed)), s)?;
    }
    let chart = dir.join(format!(
        "{}.png",
        dir.file_name().and_then(|n| n.to_str()).unwrap_or("chart")
    ));
    render_dir(&dir, &chart, title)?;
    Ok(ExperimentOutput { dir, chart, series })
}
