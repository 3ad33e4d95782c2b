//! `simplikit`: generate, validate and evaluate Java method simplifications.

mod data;
mod error;
mod output;
mod project;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;
use settings::Common;

#[derive(Parser, Debug)]
#[command(name = "simplikit", version, about = "Java method simplification toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate, filter, rank and optionally validate simplifications.
    Simplify(SimplifyArgs),
    /// Deletion-only reduction against a project's test suite.
    Reduce(ReduceArgs),
    /// Extract simplification pairs from commit history.
    Mine(MineArgs),
    /// Assign project-disjoint train/validation/test splits.
    Split(SplitArgs),
    /// Validate candidate methods, or mark dataset records valid.
    Validate(ValidateArgs),
    /// Score predictions against a dataset.
    Eval(EvalArgs),
    /// Size and complexity metrics of methods.
    Metrics(MetricsArgs),
}

#[derive(Args, Debug)]
pub struct SimplifyArgs {
    /// A file holding one method, or a dataset JSONL file.
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    /// Method file inside the project (relative to its root).
    #[arg(long, requires = "method")]
    pub file: Option<PathBuf>,
    /// Method name inside `--file`.
    #[arg(long, requires = "file")]
    pub method: Option<String>,
    /// Localization of the generator input.
    #[arg(long, value_enum, default_value_t = Localize::None)]
    pub localize: Localize,
    /// Extra candidate method files, validated with the generated ones.
    #[arg(long = "candidate")]
    pub candidates: Vec<PathBuf>,
    /// Write the accepted (or, without a project, best-ranked) method here.
    #[arg(long)]
    pub write_method: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Localize {
    /// Plain method text.
    None,
    /// Mark lines touched by applicable rewrites.
    Heuristic,
    /// Use the dataset's ground-truth markers (dataset input only).
    Perfect,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    /// A file holding the method to reduce.
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, requires = "method")]
    pub file: Option<PathBuf>,
    #[arg(long, requires = "file")]
    pub method: Option<String>,
    #[arg(long, value_enum, default_value_t = GranularityArg::Statement)]
    pub granularity: GranularityArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GranularityArg {
    Statement,
    Line,
}

#[derive(Args, Debug)]
pub struct MineArgs {
    /// Git repository to read.
    #[arg(long, conflicts_with = "commits")]
    pub git: Option<PathBuf>,
    /// Commit records as JSONL instead of a repository.
    #[arg(long)]
    pub commits: Option<PathBuf>,
    /// Treat each top-level directory of the repository as a project.
    #[arg(long)]
    pub per_directory: bool,
    /// Project id when the repository is a single project (default: its
    /// directory name).
    #[arg(long)]
    pub project_name: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    /// Dataset JSONL.
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Candidate method files.
    pub candidates: Vec<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    /// The original method; located in the project by its tokens.
    #[arg(long)]
    pub original: Option<PathBuf>,
    #[arg(long, requires = "method")]
    pub file: Option<PathBuf>,
    #[arg(long, requires = "file")]
    pub method: Option<String>,
    /// Mark the records of this dataset valid or whole instead.
    #[arg(long, conflicts_with_all = ["candidates", "original", "file"])]
    pub dataset: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Predictions JSONL.
    #[arg(long)]
    pub pred: PathBuf,
    /// Dataset JSONL with the ground truth.
    #[arg(long)]
    pub gold: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    /// Method files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Report deltas from the single input to this simplified method.
    #[arg(long)]
    pub against: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Command::Simplify(a) => project::simplify(a),
        Command::Reduce(a) => project::reduce(a),
        Command::Validate(a) => project::validate(a),
        Command::Mine(a) => data::mine(a),
        Command::Split(a) => data::split(a),
        Command::Eval(a) => data::eval(a),
        Command::Metrics(a) => data::metrics(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { error::BAD_CONFIG } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("simplikit: {e}");
            ExitCode::from(e.code())
        }
    }
}
