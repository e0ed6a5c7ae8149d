use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pld::commands::{self, ClusterArgs, InspectArgs, LearnArgs, Mode, PredictArgs};
use pld::config::Config;
use pld::error::exit;
use pld::PldError;

#[derive(Parser)]
#[command(name = "pld", version, about = "Probabilistic law discovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Classify,
    Regress,
    Anomaly,
}

#[derive(Subcommand)]
enum Command {
    /// Learn probabilistic laws from a CSV file and write a model.
    Learn {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Column kinds and quantization depth to use instead of inference.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Conclusion predicates or columns, comma separated.
        #[arg(long, value_delimiter = ',')]
        targets: Vec<String>,
        /// Numeric columns to quantize into range targets for regression.
        #[arg(long, value_delimiter = ',')]
        range_targets: Vec<String>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Apply a model to a CSV file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "classify")]
        mode: ModeArg,
        #[arg(long, value_delimiter = ',')]
        targets: Vec<String>,
        /// Minimum law probability counted by anomaly scoring.
        #[arg(long, default_value_t = commands::DEFAULT_P_MIN)]
        p_min: f64,
        /// Fail on any tie between maximal-probability laws.
        #[arg(long)]
        strict_ties: bool,
        /// Reads `strict_ties` from a config file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Regression averages range midpoints without probability weights.
        #[arg(long)]
        unweighted: bool,
    },
    /// Find feature clusters and assign objects to them.
    Cluster {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Score band width for member similarity (default 0.1).
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// List the laws of a model, optionally checking them exhaustively.
    Inspect {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        conclusion: Option<String>,
        #[arg(long)]
        min_prob: Option<f64>,
        #[arg(long)]
        max_size: Option<usize>,
        /// Training CSV to re-derive the laws from by full enumeration.
        #[arg(long)]
        oracle: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), PldError> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Learn {
            data,
            config,
            manifest,
            out,
            targets,
            range_targets,
            threads,
        } => {
            commands::learn(
                &LearnArgs {
                    data,
                    config,
                    manifest,
                    out,
                    targets,
                    range_targets,
                    threads,
                },
                &mut stdout,
            )?;
        }
        Command::Predict {
            model,
            data,
            out,
            mode,
            targets,
            p_min,
            strict_ties,
            config,
            unweighted,
        } => {
            let from_config = match &config {
                Some(p) => Config::load(p)?.strict_ties,
                None => false,
            };
            let mode = match mode {
                ModeArg::Classify => Mode::Classify,
                ModeArg::Regress => Mode::Regress,
                ModeArg::Anomaly => Mode::Anomaly,
            };
            let n = commands::predict(&PredictArgs {
                model,
                data,
                out: out.clone(),
                mode,
                targets,
                p_min,
                strict_ties: strict_ties || from_config,
                unweighted,
            })?;
            println!("wrote {} rows to {}", n, out.display());
        }
        Command::Cluster {
            model,
            data,
            out,
            epsilon,
        } => {
            let n = commands::cluster(&ClusterArgs {
                model,
                data,
                out: out.clone(),
                epsilon,
            })?;
            println!("wrote {} clusters to {}", n, out.display());
        }
        Command::Inspect {
            model,
            conclusion,
            min_prob,
            max_size,
            oracle,
        } => {
            let text = commands::inspect(&InspectArgs {
                model,
                conclusion,
                min_prob,
                max_size,
                oracle,
            })?;
            print!("{}", text);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(exit::SUCCESS as u8),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
