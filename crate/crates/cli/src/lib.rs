//! Command-line front end: ingestion, analysis, and CSV/GeoJSON writers.
//!
//! Every run echoes its full configuration, the tool version, and the
//! effective seed into the output metadata (a `.meta.json` sidecar next to
//! CSV outputs, an embedded member in GeoJSON ones), which is enough to
//! reproduce the run exactly. Exit codes: 0 on success, 2 for usage and
//! input-file problems, 1 for analysis errors.

pub mod output;
mod run;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use run::execute;

#[derive(Parser)]
#[command(
    name = "colocate",
    version,
    about = "Point-based colocation analysis: colocation quotients, significance tests, cross K, NNI"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Global colocation quotients with Monte Carlo significance, batched
    /// over categories and bandwidths
    GlobalClq(GlobalClqArgs),
    /// Per-point local colocation quotients with restricted-random-labeling
    /// significance; writes CSV and GeoJSON
    Lclq(LclqArgs),
    /// Cross K function with simulation envelopes
    CrossK(CrossKArgs),
    /// Nearest-neighbor index (Clark-Evans)
    Nni(NniArgs),
    /// Local quotients under Euclidean and network metrics side by side,
    /// with their correlation and per-point deltas
    CompareMetrics(CompareMetricsArgs),
    /// Execute a saved run configuration (JSON, as echoed in run metadata)
    #[serde(skip)]
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricArg {
    Euclidean,
    Network,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelArg {
    Gaussian,
    Box,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct InputArgs {
    /// Point data: CSV with header id,x,y,category, or GeoJSON points
    #[arg(long)]
    pub points: PathBuf,
    /// Property key carrying the category in GeoJSON input
    #[arg(long, default_value = "category")]
    #[serde(default = "default_category_field")]
    pub category_field: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct NetworkArgs {
    /// Road network: GeoJSON linestrings, or an edge CSV (requires --nodes)
    #[arg(long)]
    #[serde(default)]
    pub network: Option<PathBuf>,
    /// Node table node_id,x,y accompanying an edge CSV
    #[arg(long)]
    #[serde(default)]
    pub nodes: Option<PathBuf>,
    /// Warn when a point snaps farther than this many meters
    #[arg(long, default_value_t = 500.0)]
    #[serde(default = "default_snap_warn")]
    pub snap_warn: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimArgs {
    /// Monte Carlo trials
    #[arg(long, default_value_t = colocate::inference::DEFAULT_TRIALS)]
    #[serde(default = "default_permutations")]
    pub permutations: usize,
    /// Master seed; drawn from entropy and printed to stderr when omitted
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    /// Significance threshold
    #[arg(long, default_value_t = 0.05)]
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AreaArgs {
    /// Study area in square meters
    #[arg(long)]
    #[serde(default)]
    pub area: Option<f64>,
    /// Use the points' bounding-box area instead (emits a warning)
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    pub area_bbox: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GlobalClqArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Origin category; repeat or comma-separate for batches
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub a: Vec<String>,
    /// Target category; repeat or comma-separate for batches
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub b: Vec<String>,
    /// Bandwidth as a neighbor rank; comma-separate for batches
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "1")]
    #[serde(default = "default_k_list")]
    pub k: Vec<usize>,
    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    #[serde(default = "default_metric")]
    pub metric: MetricArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub net: NetworkArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sim: SimArgs,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LclqArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Origin category
    #[arg(long)]
    pub a: String,
    /// Target category
    #[arg(long)]
    pub b: String,
    /// Bandwidth as a neighbor rank
    #[arg(long, default_value_t = 10)]
    #[serde(default = "default_k")]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    #[serde(default = "default_metric")]
    pub metric: MetricArg,
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    #[serde(default = "default_kernel")]
    pub kernel: KernelArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub net: NetworkArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sim: SimArgs,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
    /// GeoJSON output path; defaults to the CSV path with a .geojson extension
    #[arg(long)]
    #[serde(default)]
    pub geojson_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CrossKArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Origin category
    #[arg(long)]
    pub a: String,
    /// Target category
    #[arg(long)]
    pub b: String,
    /// Maximum distance of the grid (meters)
    #[arg(long)]
    pub dmax: f64,
    /// Number of grid steps from 0 to dmax, inclusive
    #[arg(long, default_value_t = 25)]
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    #[serde(default = "default_metric")]
    pub metric: MetricArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub net: NetworkArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub area: AreaArgs,
    /// Envelope trials
    #[arg(long, default_value_t = colocate::diagnostics::DEFAULT_ENVELOPE_TRIALS)]
    #[serde(default = "default_envelope_permutations")]
    pub permutations: usize,
    /// Master seed; drawn from entropy and printed to stderr when omitted
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    /// Output CSV path for the curve
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct NniArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Restrict to one category (default: the whole joint population)
    #[arg(long)]
    #[serde(default)]
    pub a: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub area: AreaArgs,
    /// Optional one-row CSV output
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CompareMetricsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Origin category
    #[arg(long)]
    pub a: String,
    /// Target category
    #[arg(long)]
    pub b: String,
    /// Bandwidth as a neighbor rank
    #[arg(long, default_value_t = 10)]
    #[serde(default = "default_k")]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    #[serde(default = "default_kernel")]
    pub kernel: KernelArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub net: NetworkArgs,
    /// Output CSV path for per-point values and deltas
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON run configuration, as echoed into output metadata
    #[arg(long)]
    pub config: PathBuf,
}

fn default_category_field() -> String {
    "category".into()
}
fn default_snap_warn() -> f64 {
    500.0
}
fn default_permutations() -> usize {
    colocate::inference::DEFAULT_TRIALS
}
fn default_envelope_permutations() -> usize {
    colocate::diagnostics::DEFAULT_ENVELOPE_TRIALS
}
fn default_alpha() -> f64 {
    0.05
}
fn default_k() -> usize {
    10
}
fn default_k_list() -> Vec<usize> {
    vec![1]
}
fn default_steps() -> usize {
    25
}
fn default_metric() -> MetricArg {
    MetricArg::Euclidean
}
fn default_kernel() -> KernelArg {
    KernelArg::Gaussian
}

/// CLI failure modes, mapped onto exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Lib(#[from] colocate::Error),
}

impl CliError {
    /// 2 for usage/input problems, 1 for analysis failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Lib(_) => 1,
        }
    }
}
