use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "tourney", version, about = "Feedback arc set and SCC experiments on tournaments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an algorithm over one or more seeded instances.
    Run(RunArgs),
    /// Write a generated tournament to a file.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Ptas,
    Indegree,
    Kwiksort,
    Addapprox,
    OracleDp,
    OracleBrute,
    Hampath,
    Scc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    Transitive,
    Cycle,
    Uniform,
    Planted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    #[default]
    Text,
    Binary,
}

#[derive(Debug, Clone, Args)]
pub struct Instance {
    #[arg(long = "gen", value_enum)]
    pub gen: Option<GenKind>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Flip probability for `planted`.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[command(flatten)]
    pub instance: Instance,
    /// Read the tournament from a file instead of generating it.
    #[arg(long, conflicts_with = "gen")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Level passes `p`.
    #[arg(long)]
    pub passes: Option<usize>,
    /// Constant profile; `TOURNEY_PROFILE` takes precedence.
    #[arg(long)]
    pub profile: Option<String>,
    /// `canonical`, `shuffle:<seed>` or `by-source`.
    #[arg(long, default_value = "canonical")]
    pub stream_order: String,
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of `key=value` lines for the PTAS configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub instance: Instance,
    #[arg(long, value_enum, default_value_t)]
    pub format: FileFormat,
    #[arg(long)]
    pub out: PathBuf,
}
