//! The `svdd` command: synthesize or ingest well logs, prepare them, rank
//! features with Relief and run the leave-one-well-out comparison.
//!
//! Exit codes: 0 success, 1 I/O or data error, 2 usage or configuration
//! error, 3 nothing left after cleaning, 4 a split has no minority training
//! rows, 5 a solver did not converge (the report is still written).

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use svdd_core::Error;

use config::{read_config_file, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Io { .. } => 1,
            Self::Core(e) => match e {
                Error::InvalidConfig(_)
                | Error::InfeasibleCost { .. }
                | Error::UnknownWell(_)
                | Error::InvalidK { .. } => 2,
                Error::EmptyResult => 3,
                Error::NoMinorityTrainingData(_) => 4,
                Error::NonConvergence { .. } => 5,
                _ => 1,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "svdd", version, about = "One-class SVDD workflow for imbalanced well-log data")]
struct Cli {
    /// Flat key=value configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a seeded synthetic well table to <out>/wells.csv.
    Synth(SynthArgs),
    /// Clean, resample and threshold a table; write prepared.csv and histogram.csv.
    Prepare(PrepareArgs),
    /// Rank features with Relief; write relief.csv and selected.txt.
    Features(FeaturesArgs),
    /// Leave-one-well-out comparison; write report.csv and models/.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    wells: Option<String>,
    #[arg(long)]
    rows: Option<String>,
    /// Majority fraction in (0,1).
    #[arg(long)]
    skew: Option<String>,
    /// Feature count; the last two columns are noise.
    #[arg(long)]
    features: Option<String>,
}

#[derive(Debug, Args)]
struct PrepareArgs {
    /// Raw table; defaults to <out>/wells.csv.
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    /// `auto` or a fixed depth step.
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long)]
    bins: Option<String>,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    /// Prepared table; defaults to <out>/prepared.csv.
    #[arg(long)]
    prepared: Option<String>,
    /// Number of features to keep.
    #[arg(long)]
    k: Option<String>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    prepared: Option<String>,
    /// gaussian, rbf, erbf or polynomial.
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    width: Option<String>,
    #[arg(long)]
    degree: Option<String>,
    #[arg(long)]
    offset: Option<String>,
    /// SVDD cost C in [1/n, 1].
    #[arg(long)]
    cost: Option<String>,
    /// SVDD solver budget in passes over the training rows.
    #[arg(long)]
    max_passes: Option<String>,
    #[arg(long)]
    svm_cost: Option<String>,
    /// Comma-separated subset of svdd,svm,naive_bayes,discriminant.
    #[arg(long)]
    classifiers: Option<String>,
    /// Comma-separated well names, or ALL.
    #[arg(long)]
    test_wells: Option<String>,
}

fn flag_pairs(cli: &Cli) -> Vec<(&'static str, String)> {
    let mut pairs = Vec::new();
    let mut push = |key: &'static str, v: &Option<String>| {
        if let Some(v) = v {
            pairs.push((key, v.clone()));
        }
    };
    push("out", &cli.out);
    push("seed", &cli.seed);
    match &cli.command {
        Command::Synth(a) => {
            push("wells", &a.wells);
            push("rows", &a.rows);
            push("skew", &a.skew);
            push("features", &a.features);
        }
        Command::Prepare(a) => {
            push("input", &a.input);
            push("target", &a.target);
            push("threshold", &a.threshold);
            push("spacing", &a.spacing);
            push("bins", &a.bins);
        }
        Command::Features(a) => {
            push("prepared", &a.prepared);
            push("relief_k", &a.k);
        }
        Command::Run(a) => {
            push("prepared", &a.prepared);
            push("kernel", &a.kernel);
            push("width", &a.width);
            push("degree", &a.degree);
            push("offset", &a.offset);
            push("cost", &a.cost);
            push("max_passes", &a.max_passes);
            push("svm_cost", &a.svm_cost);
            push("classifiers", &a.classifiers);
            push("test_wells", &a.test_wells);
        }
    }
    pairs
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let mut pairs: Vec<(String, String)> = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => Vec::new(),
    };
    pairs.extend(flag_pairs(cli).into_iter().map(|(k, v)| (k.to_string(), v)));
    let cfg = RunConfig::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
    match cli.command {
        Command::Synth(_) => commands::synth(&cfg),
        Command::Prepare(_) => commands::prepare(&cfg),
        Command::Features(_) => commands::features(&cfg),
        Command::Run(_) => commands::run(&cfg).map(|_| ()),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::from(Error::InfeasibleCost { cost: 0.01, n: 3 }).exit_code(), 2);
        assert_eq!(CliError::from(Error::EmptyResult).exit_code(), 3);
        assert_eq!(CliError::from(Error::NoMinorityTrainingData("A".into())).exit_code(), 4);
        assert_eq!(CliError::from(Error::NonConvergence { iterations: 1, violation: 0.1 }).exit_code(), 5);
        assert_eq!(CliError::from(Error::EmptyTrainingSet).exit_code(), 1);
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
