//! `tad` — simulate scenes, build datasets, train and evaluate detectors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "tad", version, about = "Target activity detection with small feed-forward and recurrent networks")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate the scene corpus: 4-channel WAVs plus oracle SINR and labels.
    Simulate {
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract features from simulated scenes and write a TADF dataset.
    Features {
        /// Directory written by `tad simulate`.
        #[arg(long)]
        scenes: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one network configuration.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a trained model on the test split.
    Eval {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Network type the model was trained as.
        #[arg(long)]
        net: String,
        #[arg(long)]
        smoothing: Option<f64>,
    },
    /// Train the (L, N) grid for each network type and report the selected models.
    Grid {
        #[arg(long)]
        data: PathBuf,
        /// Comma-separated network types (default: all six).
        #[arg(long, value_delimiter = ',')]
        nets: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        layers: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        neurons: Vec<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        smoothing: Option<f64>,
        /// Parallel trainings.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Finite-difference check of the analytic gradients.
    Gradcheck {
        /// Network kinds to check (default: fnn,rnn,lstm,gru).
        #[arg(long, value_delimiter = ',')]
        net: Vec<String>,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2])]
        layers: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 4])]
        neurons: Vec<usize>,
    },
    /// Print the summary table of a finished grid run.
    Report {
        /// Directory written by `tad grid`.
        #[arg(long)]
        grid: PathBuf,
        /// Emit CSV instead of the aligned table.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Debug, Args)]
struct NetArgs {
    /// fnn-nos, fnn-smo, fnn-seq, rnn, lstm or gru.
    #[arg(long)]
    net: String,
    #[arg(long)]
    layers: usize,
    #[arg(long)]
    neurons: usize,
    #[arg(long)]
    smoothing: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
