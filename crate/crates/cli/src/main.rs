//! `qtoa`: config-driven Monte Carlo campaigns for pulse time-of-arrival
//! measurement with classical and quantum-correlated light.
//!
//! Exit codes: 0 success, 2 configuration error, 3 insufficient
//! statistics (the partial CSV is kept with a `status` column).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use qtoa_cli::commands::{self, CliError};
use qtoa_cli::config;

#[derive(Parser)]
#[command(
    name = "qtoa",
    about = "Time-of-arrival accuracy campaigns for classical and quantum-correlated pulse ensembles",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one campaign and write a report row.
    Simulate(RunArgs),
    /// Sweep M or N and fit the accuracy scaling exponent.
    Scaling(RunArgs),
    /// Classify the best strategy over an (M, eta) grid.
    LossMap(RunArgs),
    /// Re-run the configured campaigns and check the speed-limit bounds.
    BoundsCheck(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration file (INI-style; see the repository README).
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (affects speed only, never results).
    #[arg(long)]
    threads: Option<usize>,
    /// Also write the per-photon trial dump next to the report.
    #[arg(long)]
    dump_trials: bool,
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

type CommandFn = fn(&config::ScenarioConfig, bool) -> Result<(), CliError>;

fn run(cli: Cli) -> i32 {
    let (args, work): (&RunArgs, CommandFn) =
        match &cli.command {
            Command::Simulate(a) => (a, commands::simulate),
            Command::Scaling(a) => (a, |c, _| commands::scaling(c)),
            Command::LossMap(a) => (a, |c, _| commands::loss_map(c)),
            Command::BoundsCheck(a) => (a, |c, _| commands::bounds_check(c)),
        };
    if args.dump_trials && !matches!(cli.command, Command::Simulate(_)) {
        eprintln!("config error: --dump-trials only applies to `simulate`");
        return 2;
    }

    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", args.config.display());
            return 2;
        }
    };
    let base_dir = args
        .config
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    let mut cfg = match config::validate(&text, &base_dir) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_path = out.clone();
    }

    let dump = args.dump_trials;
    let result = match args.threads {
        Some(k) if k > 0 => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("config error: cannot build thread pool: {e}");
                    return 2;
                }
            };
            pool.install(|| work(&cfg, dump))
        }
        Some(_) => {
            eprintln!("config error: --threads must be >= 1");
            return 2;
        }
        None => work(&cfg, dump),
    };

    match result {
        Ok(()) => 0,
        Err(CliError::Config(m)) => {
            eprintln!("config error: {m}");
            2
        }
        Err(CliError::Statistics(m)) => {
            eprintln!("statistics error: {m}");
            3
        }
    }
}
