//! `tropstat` command-line interface.

mod commands;
mod envelope;
mod error;
mod io;
mod svg;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use envelope::Envelope;

#[derive(Debug, Parser)]
#[command(
    name = "tropstat",
    version,
    about = "Tropical statistics for point clouds and ultrametric trees"
)]
pub struct Cli {
    /// Numerical tolerance for membership and three-point checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Input CSV files start with a header row.
    #[arg(long, global = true)]
    pub header: bool,
    /// Do not print error messages on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tropical distance between points given inline ("0,3,1") or as CSV files.
    Metric { a: String, b: String },
    /// Fermat-Weber point of a sample.
    Fw {
        points: PathBuf,
        /// Also check the result against the three-point condition on N leaves.
        #[arg(long, value_name = "N")]
        check_ultrametric: Option<usize>,
    },
    /// Fréchet mean of a sample.
    Frechet {
        points: PathBuf,
        #[arg(long, value_name = "N")]
        check_ultrametric: Option<usize>,
    },
    /// Principal polytope with `s` vertices taken from the sample.
    Pca {
        points: PathBuf,
        #[arg(short = 's', long = "vertices")]
        s: usize,
        /// Writes <PREFIX>.coords.csv and <PREFIX>.svg (3 vertices only).
        #[arg(long, value_name = "PREFIX")]
        out_prefix: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
    /// Tropical support vector machines.
    #[command(subcommand)]
    Svm(SvmCommand),
    /// Conversions between Newick trees and ultrametrics.
    #[command(subcommand)]
    Tree(TreeCommand),
    /// Experimental tropical discriminant polytope for two classes.
    Lda {
        class1: PathBuf,
        class2: PathBuf,
        #[arg(long, default_value_t = 40)]
        grid: usize,
        #[arg(long, default_value_t = 30)]
        sweeps: usize,
        #[arg(long, default_value_t = 0.1)]
        perturbation: f64,
    },
    /// Experimental tropical regression; the last CSV column is the response.
    Regress {
        data: PathBuf,
        #[arg(long, default_value_t = 12)]
        starts: usize,
        #[arg(long, default_value_t = 200)]
        max_sweeps: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Hard,
    Soft,
}

#[derive(Debug, Subcommand)]
pub enum SvmCommand {
    /// Trains on a CSV file whose label column holds 0 or 1.
    Train {
        points: PathBuf,
        /// Zero-based label column; defaults to the last one.
        #[arg(long)]
        labels_column: Option<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::Hard)]
        mode: ModeArg,
        /// Slack penalty for soft mode.
        #[arg(short = 'C', long = "C")]
        c: Option<f64>,
        #[arg(long)]
        model_out: Option<PathBuf>,
    },
    /// Prints one label per line; the envelope goes to stderr.
    Predict {
        #[arg(long)]
        model: PathBuf,
        points: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum TreeCommand {
    /// Cophenetic vectors of the trees in a Newick file.
    Newick2ultra {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equidistant trees from a CSV file of ultrametrics.
    Ultra2newick {
        input: PathBuf,
        /// Comma-separated leaf names; defaults to a, b, c, ...
        #[arg(long)]
        leaves: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Three-point verdicts for a Newick file or a CSV file of vectors.
    Check { input: PathBuf },
    /// Random equidistant trees.
    Simulate {
        #[arg(long)]
        n_leaves: usize,
        #[arg(long, default_value_t = 1.0)]
        height: f64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Metric { .. } => "metric",
            Command::Fw { .. } => "fw",
            Command::Frechet { .. } => "frechet",
            Command::Pca { .. } => "pca",
            Command::Svm(SvmCommand::Train { .. }) => "svm train",
            Command::Svm(SvmCommand::Predict { .. }) => "svm predict",
            Command::Tree(TreeCommand::Newick2ultra { .. }) => "tree newick2ultra",
            Command::Tree(TreeCommand::Ultra2newick { .. }) => "tree ultra2newick",
            Command::Tree(TreeCommand::Check { .. }) => "tree check",
            Command::Tree(TreeCommand::Simulate { .. }) => "tree simulate",
            Command::Lda { .. } => "lda",
            Command::Regress { .. } => "regress",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let to_stderr = matches!(cli.command, Command::Svm(SvmCommand::Predict { .. }));
    match commands::run(&cli) {
        Ok(out) => {
            if let Some(stream) = &out.stream {
                emit(stream, false);
            }
            let env = Envelope::ok(name, out.result, out.diagnostics, out.seed).render();
            if !(to_stderr && cli.quiet) {
                emit(&(env + "\n"), to_stderr);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let env = Envelope::error(name, &e).render();
            emit(&(env + "\n"), to_stderr);
            if !cli.quiet {
                emit(&format!("error: {e}\n"), true);
            }
            ExitCode::from(e.code as u8)
        }
    }
}

/// Writes to stdout or stderr, ignoring a closed pipe.
fn emit(text: &str, stderr: bool) {
    let _ = if stderr {
        std::io::stderr().lock().write_all(text.as_bytes())
    } else {
        std::io::stdout().lock().write_all(text.as_bytes())
    };
}
