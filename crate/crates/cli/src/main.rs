//! `hboltz`: assemble collision-tensor caches, run spatially homogeneous
//! relaxation experiments, and report model constants.

// NaN-rejecting `!(x > 0)` guards and `% 2` parity tests are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::CacheMiss;
use config::RunConfig;

const EXIT_CONFIG: u8 = 2;
const EXIT_CACHE_MISS: u8 = 3;
const EXIT_MEMORY: u8 = 4;
const EXIT_NUMERICAL: u8 = 5;

#[derive(Parser)]
#[command(
    name = "hboltz",
    about = "Hermite-Galerkin spectral solver for the homogeneous Boltzmann equation with IPL kernels",
    version
)]
struct Cli {
    /// Config file with `key = value` lines; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// IPL exponent eta (> 3); eta = 5 is Maxwell molecules.
    #[arg(long, global = true)]
    eta: Option<f64>,

    /// Solution-space degree cap M.
    #[arg(short, long, global = true)]
    m: Option<u32>,

    /// Quadratic-core degree cap M0 (<= M).
    #[arg(long, global = true)]
    m0: Option<u32>,

    /// Collision model: quadratic | hybrid | bgk.
    #[arg(long, global = true)]
    model: Option<String>,

    /// Time step.
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// End time.
    #[arg(long, global = true)]
    t_end: Option<f64>,

    /// Experiment: bkw | bigaussian | discontinuous | file:PATH.
    #[arg(long, global = true)]
    experiment: Option<String>,

    /// Tensor cache directory (env HBOLTZ_CACHE_DIR also applies).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Output directory for CSV files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Force single-threaded assembly (bit-deterministic regression runs).
    #[arg(long, global = true)]
    single_thread: bool,

    /// Additional overrides as key=value (any config key).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Precompute the collision tensor for (eta, M0) and cache it.
    Assemble,
    /// Integrate the configured experiment and write trajectory /
    /// marginal CSVs.
    Run,
    /// Print index-set sizes, the dense memory estimate and relaxation
    /// constants.
    Info,
    /// Print the effective configuration in config-file format.
    Config,
    /// Tensor cache maintenance.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// List cached tensors.
    Ls,
    /// Remove the cache for the configured (eta, M0), or everything.
    Rm {
        /// Remove every tensor cache in the cache directory.
        #[arg(long)]
        all: bool,
    },
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Ok(dir) = std::env::var("HBOLTZ_CACHE_DIR") {
        if !dir.is_empty() {
            config.cache_dir = PathBuf::from(dir);
        }
    }
    if let Some(v) = cli.eta {
        config.eta = v;
    }
    if let Some(v) = cli.m {
        config.m = v;
    }
    if let Some(v) = cli.m0 {
        config.m0 = v;
    }
    if let Some(v) = &cli.model {
        config.model = v.parse()?;
    }
    if let Some(v) = cli.dt {
        config.dt = v;
    }
    if let Some(v) = cli.t_end {
        config.t_end = v;
    }
    if let Some(v) = &cli.experiment {
        config.experiment = v.parse()?;
    }
    if let Some(v) = &cli.cache_dir {
        config.cache_dir = v.clone();
    }
    if let Some(v) = &cli.out_dir {
        config.output_dir = v.clone();
    }
    if cli.single_thread {
        config.single_thread = true;
    }
    for kv in &cli.sets {
        let (key, value) = kv
            .split_once('=')
            .with_context(|| format!("--set expects KEY=VALUE, got '{kv}'"))?;
        config.set(key.trim(), value.trim())?;
    }
    config.validate()?;
    Ok(config)
}

fn classify(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<CacheMiss>().is_some() {
        return EXIT_CACHE_MISS;
    }
    if let Some(core) = err.downcast_ref::<hboltz_core::Error>() {
        return match core {
            hboltz_core::Error::MemoryCap { .. } => EXIT_MEMORY,
            hboltz_core::Error::Cache(_) => EXIT_CACHE_MISS,
            _ => EXIT_NUMERICAL,
        };
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if matches!(cli.command, Command::Run) {
        if let Err(e) = config.validate_for_run() {
            eprintln!("config error: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let result = match &cli.command {
        Command::Assemble => commands::cmd_assemble(&config),
        Command::Run => commands::cmd_run(&config),
        Command::Info => commands::cmd_info(&config),
        Command::Config => {
            print!("{}", config.to_config_string());
            Ok(())
        }
        Command::Cache { action } => match action {
            CacheAction::Ls => commands::cmd_cache_ls(&config),
            CacheAction::Rm { all } => commands::cmd_cache_rm(&config, *all),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}
