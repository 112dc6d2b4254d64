//! Experiment runner for the spin-network simulator: executes config-file
//! sweeps, emits figure CSV bundles, and cross-checks the engine against its
//! oracles. Exit codes: 0 success, 1 config error, 2 numeric error.

mod config;
mod csvout;
mod figures;
mod tasks;
mod verify;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use config::Overrides;

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "SPINNET_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

impl From<spinnet::Error> for CliError {
    fn from(e: spinnet::Error) -> Self {
        match e {
            spinnet::Error::Numeric(_) | spinnet::Error::Search(_) => {
                CliError::Numeric(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "spinnet",
    version,
    about = "Spin-network state transfer and entanglement simulator",
    after_help = "Output defaults to the directory named by SPINNET_OUT_DIR (else the \
                  working directory). --lambda and --gamma take precedence over config \
                  and recipe values; `verify` pins its own parameters and ignores them."
)]
struct Cli {
    /// Worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Coupling scale, overriding config and figure recipes
    #[arg(long, global = true)]
    lambda: Option<f64>,

    /// Decoherence rate, overriding config and figure recipes
    #[arg(long, global = true)]
    gamma: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every experiment in a config file
    Run {
        /// TOML file with one or more [[experiment]] tables
        config_path: PathBuf,
    },
    /// Emit the CSV bundle for a named figure (fig1..fig6)
    Figure {
        name: String,
        /// Directory for the bundle (default: SPINNET_OUT_DIR or ".")
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the engine against closed forms and independent integrators
    Verify {
        /// Run only the fast subset of checks
        #[arg(long)]
        quick: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    if let Some(l) = cli.lambda {
        if !(l > 0.0 && l.is_finite()) {
            return Err(CliError::Config(format!("--lambda {l} must be positive")));
        }
    }
    if let Some(g) = cli.gamma {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(CliError::Config(format!("--gamma {g} must be >= 0")));
        }
    }
    let overrides = Overrides {
        lambda: cli.lambda,
        gamma: cli.gamma,
    };

    match cli.command {
        Command::Run { config_path } => tasks::run_file(&config_path, &overrides),
        Command::Figure { name, out } => figures::emit(&name, out.as_deref(), &overrides),
        Command::Verify { quick } => verify::run(quick),
    }
}
