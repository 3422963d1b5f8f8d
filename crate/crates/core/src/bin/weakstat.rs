use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weakstat::cli::{execute, ExperimentKind, Invocation, EXIT_ERROR};

/// Seminorms, complexities and uniform deviation certificates for
/// weakly interacting statistics.
#[derive(Debug, Parser)]
#[command(name = "weakstat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Interaction seminorms of a statistic.
    Seminorm(RunArgs),
    /// Gaussian or Rademacher average of an evaluated class.
    Complexity(RunArgs),
    /// Uniform deviation certificate.
    Bound(RunArgs),
    /// Identity and inequality checks.
    Verify(RunArgs),
    /// Trimmed K-means with a certificate.
    Cluster(RunArgs),
    /// Ranker selection with an AUC lower bound.
    Rank(RunArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage_only = !e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage_only { 0 } else { EXIT_ERROR as u8 });
        }
    };
    let (kind, args) = match cli.command {
        Command::Seminorm(a) => (ExperimentKind::Seminorm, a),
        Command::Complexity(a) => (ExperimentKind::Complexity, a),
        Command::Bound(a) => (ExperimentKind::Bound, a),
        Command::Verify(a) => (ExperimentKind::Verify, a),
        Command::Cluster(a) => (ExperimentKind::Cluster, a),
        Command::Rank(a) => (ExperimentKind::Rank, a),
    };
    let inv = Invocation {
        kind,
        config: args.config,
        seed: args.seed,
        out: args.out,
    };
    ExitCode::from(execute(&inv) as u8)
}
