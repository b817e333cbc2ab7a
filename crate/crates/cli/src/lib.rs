mod boxes;
mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sodkit::assign::{AssignerKind, Criterion};

use crate::config::Protocol;

/// Label-assignment simulation, proposal scoring and spectral feature
/// filtering for small object detection.
#[derive(Debug, Parser)]
#[command(name = "sodkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate label assignment on random small GTs and report positives per size bin.
    Simulate(SimulateArgs),
    /// Score proposals against GTs and write the score matrix as CSV.
    Score(ScoreArgs),
    /// Purify an FTM1 feature map with the hierarchical highpass filter.
    Purify(PurifyArgs),
    /// Split an FTM1 feature map into low- and high-frequency components.
    Fdsplit(FdsplitArgs),
    /// Assignment statistics over a COCO annotation file.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads [default: all cores]. Output does not depend on it.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Directory for report.json, report.csv and the charts.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Assigners to run, comma-separated [default: one_stage_maxiou,two_stage_maxiou,mcla].
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    assigners: Option<Vec<AssignerKind>>,
    /// Threshold set: `study` (no low-quality matching) or `canonical` [default: study].
    #[arg(long)]
    protocol: Option<Protocol>,
    /// MCLA weights λ1,λ2,λ3 [default: 1,3,1].
    #[arg(long, value_delimiter = ',', num_args = 3, value_name = "L1,L2,L3")]
    lambda: Option<Vec<f64>>,
    /// Skip bars.svg and pie.svg.
    #[arg(long)]
    no_charts: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    report: ReportArgs,
    /// Seed of the first trial; trial t uses seed + t [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent trials [default: 5].
    #[arg(long)]
    trials: Option<usize>,
    /// GTs per trial [default: 2000].
    #[arg(long)]
    n_gts: Option<usize>,
    /// Square canvas side in pixels [default: 800].
    #[arg(long, value_name = "PX")]
    image_size: Option<u32>,
    /// Largest allowed box side in pixels [default: 64].
    #[arg(long, value_name = "PX")]
    max_dim: Option<f64>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[command(flatten)]
    common: Common,
    /// GT boxes as CSV with an x1,y1,x2,y2 header.
    #[arg(long, value_name = "CSV")]
    gts: PathBuf,
    /// Proposal boxes as CSV with an x1,y1,x2,y2 header.
    #[arg(long, value_name = "CSV")]
    proposals: PathBuf,
    /// Output CSV path.
    #[arg(long, short, value_name = "CSV")]
    out: PathBuf,
    /// Matrix to export: iou, poc, scc or mcla.
    #[arg(long, default_value = "mcla")]
    criterion: Criterion,
    /// MCLA weights λ1,λ2,λ3 [default: 1,3,1].
    #[arg(long, value_delimiter = ',', num_args = 3, value_name = "L1,L2,L3")]
    lambda: Option<Vec<f64>>,
    /// Position-offset mapping factor [default: 20].
    #[arg(long)]
    c_poc: Option<f64>,
    /// Shape-constraint mapping factor [default: 0.25].
    #[arg(long)]
    c_scc: Option<f64>,
}

#[derive(Debug, Args)]
struct PurifyArgs {
    #[command(flatten)]
    common: Common,
    /// Input FTM1 tensor.
    #[arg(long, short, value_name = "FTM")]
    input: PathBuf,
    /// Output FTM1 tensor.
    #[arg(long, short, value_name = "FTM")]
    out: PathBuf,
    /// Pyramid level of the input; must be below the relay level.
    #[arg(long, default_value_t = 0)]
    level: usize,
    /// Relay level r [default: 2].
    #[arg(long)]
    relay: Option<usize>,
    /// Filtering intensity μ [default: 0.05].
    #[arg(long)]
    mu: Option<f64>,
    /// Weight ω of the filtered branch [default: 0.3].
    #[arg(long)]
    omega: Option<f64>,
    /// Also write the binary mask as a single-channel FTM1 tensor.
    #[arg(long, value_name = "FTM")]
    emit_mask: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FdsplitArgs {
    #[command(flatten)]
    common: Common,
    /// Input FTM1 tensor.
    #[arg(long, short, value_name = "FTM")]
    input: PathBuf,
    /// Directory for <stem>.low.ftm and <stem>.high.ftm [default: next to the input].
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Lowpass cutoff D_l [default: 0.85].
    #[arg(long)]
    d_l: Option<f64>,
    /// Highpass cutoff D_h [default: 0.10].
    #[arg(long)]
    d_h: Option<f64>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    report: ReportArgs,
    /// COCO-format annotation JSON.
    #[arg(long, value_name = "JSON")]
    annotations: PathBuf,
    /// Prior layout: native, one_stage or two_stage [default: native, or the config's pyramid].
    #[arg(long)]
    priors: Option<commands::PriorChoice>,
}

/// Exit statuses: 0 success, 1 usage error, 2 data error.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// Why a command did not complete, and the exit status it maps to. Help
/// and version requests land here too, with status 0.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn from_error(e: anyhow::Error) -> Self {
        let code = if e.downcast_ref::<UsageError>().is_some() {
            1
        } else {
            2
        };
        Failure {
            code,
            message: format!("error: {e:#}"),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn execute<I, T>(args: I) -> Result<(), Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Failure {
        code: if e.use_stderr() { 1 } else { 0 },
        message: e.render().to_string(),
    })?;
    commands::run(cli.command).map_err(Failure::from_error)
}
