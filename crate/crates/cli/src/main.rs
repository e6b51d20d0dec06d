mod commands;
mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::{Overrides, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invariant breach: {0}")]
    Breach(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Breach(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "kirwanlab",
    version,
    about = "Fixed-locus certificates, Nahm flows, eigenpaths and Kempf-Ness checks"
)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Character of the fixed components and the surjectivity verdict
    Certificate,
    /// Classify potential growth along left-right gauge flows
    Growth,
    /// Discretization and potential checks for Nahm data
    NahmCheck,
    /// Track eigenvalue paths of a Hermitian family
    Eigenpaths {
        #[arg(long, value_parser = ["crossing", "constant", "avoided"], conflicts_with = "input", required_unless_present = "input")]
        demo: Option<String>,
        /// Family JSON {"n", "degree", "coefficients"}
        #[arg(long)]
        input: Option<PathBuf>,
        /// Parameter interval as a,b
        #[arg(
            long,
            value_delimiter = ',',
            num_args = 1,
            allow_hyphen_values = true,
            default_value = "-1,1"
        )]
        interval: Vec<f64>,
    },
    /// Minimize orbit functions along torus directions
    KempfNess {
        #[arg(long, conflicts_with_all = ["input", "random"])]
        toy: bool,
        /// Seeded random flat problem
        #[arg(long, conflicts_with = "input")]
        random: bool,
        /// Problem JSON {"y0", "weights", "char_weight", "directions"}
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Moment map, Nakajima form and stability of ADHM data
    Moment {
        /// ADHM JSON {"n", "X", "Y", "i", "j"}; random points when absent
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// ADHM data of a configuration of distinct points
    FromPoints {
        /// List of [x_re, x_im, y_re, y_im]; random points when absent
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("KIRWANLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("KIRWANLAB_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let cfg = RunConfig::resolve(&cli.overrides)?;
    match cli.command {
        Command::Certificate => commands::certificate(&cfg),
        Command::Growth => commands::growth(&cfg),
        Command::NahmCheck => commands::nahm_check(&cfg),
        Command::Eigenpaths { demo, input, interval } => {
            commands::eigenpaths(&cfg, demo.as_deref(), input.as_deref(), &interval)
        }
        Command::KempfNess { toy, random, input } => commands::kempf_ness(&cfg, toy, random, input.as_deref()),
        Command::Moment { input } => commands::moment(&cfg, input.as_deref()),
        Command::FromPoints { input } => commands::from_points(&cfg, input.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
