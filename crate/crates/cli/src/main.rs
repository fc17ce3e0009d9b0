use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use ssag::{config_hash, load_config, run_command, write_report, Command};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Classify the interference graph and list equilibrium guarantees.
    Classify,
    /// Find a pure Nash equilibrium and verify it.
    Solve,
    /// Check every applicable potential function against all deviations.
    PotentialCheck,
    /// Price of anarchy by enumeration.
    Poa,
    /// Simulate a fixed profile and report the maximum-likelihood estimates.
    Estimate,
    /// Run distributed learning once.
    Learn,
    /// Run `learning.policy` once.
    Simulate,
    /// Paired comparison of `learning.policies` over replications.
    Compare,
    /// Mean welfare of learning over `learning.gamma_sweep`.
    GammaSweep,
}

impl Cmd {
    fn command(self) -> Command {
        match self {
            Cmd::Classify => Command::Classify,
            Cmd::Solve => Command::Solve,
            Cmd::PotentialCheck => Command::PotentialCheck,
            Cmd::Poa => Command::Poa,
            Cmd::Estimate => Command::Estimate,
            Cmd::Learn => Command::Learn,
            Cmd::Simulate => Command::Simulate,
            Cmd::Compare => Command::Compare,
            Cmd::GammaSweep => Command::GammaSweep,
        }
    }
}

/// Spatial spectrum access games: equilibria, learning and simulation.
#[derive(Debug, Parser)]
#[command(name = "ssag", version)]
struct Cli {
    command: Cmd,
    /// Experiment config (JSON).
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Report directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for replications (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// More log output; repeat for more.
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = load_config(&cli.config)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = cli.out {
        cfg.output.dir = o;
    }
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .context("cannot configure worker threads")?;
    }
    let hash = config_hash(&cfg);
    let dir = cfg.output.dir.clone();
    std::fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let echo = dir.join("config.echo.json");
    std::fs::write(&echo, cfg.echo() + "\n")
        .with_context(|| format!("cannot write {}", echo.display()))?;

    let cmd = cli.command.command();
    let outcome = run_command(cmd, &cfg)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for (name, table) in &outcome.tables {
        let path = write_report(table, &dir, name, &hash, cfg.seed)?;
        println!("wrote {}", path.display());
    }
    Ok(outcome.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
