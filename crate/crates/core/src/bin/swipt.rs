use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use swipt_rl::experiments::{
    read_series_dir, read_sweep_csv, render_chart, render_sweep_chart, run_experiment, sweep,
    train_agent, write_series_csv, ExperimentConfig, Runner, Strategy, SweepAxis,
};
use swipt_rl::{Error, Result};

#[derive(Parser)]
#[command(name = "swipt", version, about = "Train and compare time-switching/power-control learners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one learner and save its curve and a checkpoint.
    Train {
        #[command(flatten)]
        common: Common,
        /// Learner to train.
        #[arg(long, default_value = "ddqn-ucb")]
        strategy: Strategy,
    },
    /// Train every configured strategy under every seed.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Final ASR of one strategy across values of an environment parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// pu_slots (L), num_slots (T), battery_init (B0) or tau.
        #[arg(long)]
        axis: Option<SweepAxis>,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
        #[arg(long, default_value = "ddqn-ucb")]
        strategy: Strategy,
    },
    /// Redraw charts from the CSV files in a result directory.
    Render {
        /// Directory holding `<label>_seed<n>.csv` and optional `sweep_<axis>.csv` files.
        dir: PathBuf,
        /// Where to write the curve chart; defaults to `<dir>/<dir name>.png`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Chart title; defaults to the directory name.
        #[arg(long)]
        title: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; built-in defaults otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seeds to run, comma-separated. Overrides the file.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    seed: Vec<u64>,
    /// Output root. Overrides the file.
    #[arg(long, env = "SWIPT_OUT")]
    out: Option<PathBuf>,
    /// Episodes per run. Overrides the file and --fast.
    #[arg(long)]
    episodes: Option<usize>,
    /// 600 episodes on a 128/64 network.
    #[arg(long)]
    fast: bool,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if self.fast {
            config = config.fast();
        }
        if let Some(episodes) = self.episodes {
            config.episodes = episodes;
        }
        if !self.seed.is_empty() {
            config.seeds = self.seed.clone();
        }
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

fn train(common: &Common, strategy: Strategy) -> Result<()> {
    let config = common.resolve()?;
    let agent_config = strategy
        .agent_config(&config.agent)
        .ok_or_else(|| Error::Usage("the random policy has nothing to train; use compare".into()))?;
    let dir = config
        .output_dir
        .join(format!("train-{}-{}", strategy.name(), config.short_hash()));
    fs::create_dir_all(&dir)?;
    for &seed in &config.seeds {
        let (agent, mut series) =
            train_agent(&config.env, &agent_config, config.episodes, seed, config.smoothing_window)?;
        series.label = strategy.name().to_string();
        write_series_csv(dir.join(format!("{}_seed{seed}.csv", series.label)), &series)?;
        let ckpt = dir.join(format!("checkpoint_seed{seed}.json"));
        agent.checkpoint().save(&ckpt)?;
        println!(
            "seed {seed}: final ASR {:.4}, checkpoint {}",
            series.final_asr(config.final_window),
            ckpt.display()
        );
    }
    let series = read_series_dir(&dir)?;
    let chart = dir.join("train.png");
    render_chart(&series, &chart, &format!("{} [{}]", strategy.name(), config.short_hash()))?;
    println!("chart {}", chart.display());
    Ok(())
}

fn compare(common: &Common) -> Result<()> {
    let config = common.resolve()?;
    let out = run_experiment(&config)?;
    println!("{:<20} {:>12} {:>12}", "strategy", "final ASR", "std");
    for &strategy in &config.strategies {
        let finals: Vec<f64> = out
            .series
            .iter()
            .filter(|s| s.label == strategy.name())
            .map(|s| s.final_asr(config.final_window))
            .collect();
        println!(
            "{:<20} {:>12.4} {:>12.4}",
            strategy.name(),
            swipt_rl::experiments::stats::mean(&finals),
            swipt_rl::experiments::stats::sample_std(&finals)
        );
    }
    println!("results {}", out.dir.display());
    Ok(())
}

fn run_sweep(common: &Common, axis: Option<SweepAxis>, values: &[f64], strategy: Strategy) -> Result<()> {
    let config = common.resolve()?;
    let (axis, values) = match (axis, &config.sweep) {
        (Some(axis), _) if !values.is_empty() => (axis, values.to_vec()),
        (Some(_), _) => return Err(Error::Usage("--axis needs --values".into())),
        (None, Some(planned)) if values.is_empty() => (planned.axis, planned.values.clone()),
        _ => {
            return Err(Error::Usage(
                "give --axis and --values, or a [sweep] section in the config".into(),
            ))
        }
    };
    let out = sweep(&config, strategy, axis, &values, &mut Runner::new())?;
    println!("{:>12} {:>14} {:>12} {:>6}", axis.name(), "mean final ASR", "std", "seeds");
    for r in &out.rows {
        println!(
            "{:>12} {:>14.4} {:>12.4} {:>6}",
            r.axis_value, r.mean_final_asr, r.std_final_asr, r.seeds
        );
    }
    println!("table {}", out.table_path.display());
    Ok(())
}

fn render(dir: &Path, out: Option<&Path>, title: Option<&str>) -> Result<()> {
    let name = dir
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("results")
        .to_string();
    let title = title.unwrap_or(&name);
    let series = read_series_dir(dir)?;
    if !series.is_empty() {
        let path = out.map(Path::to_path_buf).unwrap_or_else(|| dir.join(format!("{name}.png")));
        render_chart(&series, &path, title)?;
        println!("chart {}", path.display());
    }
    let mut tables = 0;
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        if let (Some(axis), Some("csv")) = (
            stem.strip_prefix("sweep_"),
            path.extension().and_then(|e| e.to_str()),
        ) {
            let rows = read_sweep_csv(&path)?;
            let png = path.with_extension("png");
            render_sweep_chart(&rows, axis, &png, title)?;
            println!("chart {}", png.display());
            tables += 1;
        }
    }
    if series.is_empty() && tables == 0 {
        return Err(Error::Usage(format!("no result CSVs in {}", dir.display())));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train { common, strategy } => train(common, *strategy),
        Command::Compare { common } => compare(common),
        Command::Sweep {
            common,
            axis,
            values,
            strategy,
        } => run_sweep(common, *axis, values, *strategy),
        Command::Render { dir, out, title } => render(dir, out.as_deref(), title.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Usage(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
