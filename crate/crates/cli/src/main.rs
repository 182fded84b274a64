//! `chanent`: channel entropies and random-channel experiments from the shell.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 input error,
//! 3 invalid channel, 4 precondition violation, 5 numerical failure.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use chanent::channels::SchmidtKind;
use chanent::rng::DEFAULT_SEED;
use clap::{Args, Parser, Subcommand};

use crate::output::LogBase;

#[derive(Parser, Debug)]
#[command(name = "chanent", version, about = "Map entropy and channel entropy of quantum channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Units for reported entropies; all arithmetic is done in nats.
    #[arg(long, global = true, value_enum, default_value = "e")]
    pub log_base: LogBase,

    /// Tolerance overrides, e.g. `--tol symmetry=1e-8,concavity=1e-5`.
    #[arg(long, global = true, value_name = "K=V,...")]
    pub tol: Option<String>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct ChannelSource {
    /// Channel JSON, inline or as a file path.
    #[arg(long, value_name = "PATH|JSON")]
    pub channel: Option<String>,

    /// Named constructor; parameters go in `--params`.
    #[arg(long, value_name = "NAME")]
    pub named: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct ChannelArgs {
    #[command(flatten)]
    pub source: ChannelSource,

    /// JSON object of constructor parameters for `--named`.
    #[arg(long, value_name = "JSON", requires = "named")]
    pub params: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Map entropy, optimized channel entropy and their gap, as JSON.
    Entropy {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Symmetry, concavity and saturation checks for a unital qubit channel.
    VerifyUnital {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Divergence curves over Schmidt distributions for random channels, as CSV.
    Fig1 {
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        d_list: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Schmidt distributions; all four when absent.
        #[arg(long, value_delimiter = ',')]
        nu: Vec<SchmidtKind>,
        /// Also emit one row per trial.
        #[arg(long)]
        per_trial: bool,
    },
    /// Map entropy and maximally-entangled divergence against their large-d limits, as CSV.
    Conjecture {
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        d_list: Vec<usize>,
        /// Kraus rank; `d²` when absent.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Output spectrum of one channel on a sampled Schmidt input, as CSV.
    Spectrum {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value = "delta")]
        nu: SchmidtKind,
    },
    /// First two output moments against the free-product prediction, as CSV.
    FreeMoments {
        #[arg(long, default_value_t = 16)]
        d: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "dir-d-1")]
        nu: SchmidtKind,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Sample a random channel and print it as Kraus JSON.
    RandomChannel {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
