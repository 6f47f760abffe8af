use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "plp-blindspot",
    version,
    about = "Blind-spot probability of a typical localization target under line-process blocking"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form and quadrature quantities.
    Analytic {
        #[command(subcommand)]
        quantity: AnalyticCommand,
    },
    /// Monte Carlo estimate of the blind-spot probability.
    Simulate(SimulateArgs),
    /// Evaluate several methods over a grid of lambda or obstacle length; writes CSV.
    Sweep(SweepArgs),
    /// Anchor intensity that keeps the asymptotic blind-spot probability at epsilon.
    Design(DesignArgs),
    /// Sample origin-cell areas and compare them with the Gamma fit.
    ValidateCells(ValidateCellsArgs),
}

#[derive(Debug, Subcommand)]
pub enum AnalyticCommand {
    /// Asymptotic blind-spot probability (infinite lines).
    Asymptotic(ScenarioArgs),
    /// Independent-blocking baseline for infinite lines.
    Independent(ScenarioArgs),
    /// Independent-blocking baseline for segments of length --length.
    IndependentSegments {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Mean unshadowed area in m²; estimated by simulation when omitted.
        #[arg(long)]
        mean_area: Option<f64>,
    },
    /// Blind-spot probability given a visible area.
    Conditional {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Visible area in m².
        #[arg(long)]
        area: f64,
    },
    /// Probability that a point at --distance (default --range) sees the origin.
    Visibility {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        distance: Option<f64>,
    },
    /// Mean visible area and mean visible anchor count under independent blocking.
    MeanArea(ScenarioArgs),
    /// Check the obstacle intensity against the containment threshold delta.
    CheckDelta(ScenarioArgs),
}

/// Model parameters shared by every command. Flags override `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// Anchor intensity (per m²).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Obstacle foot-point intensity (per m²).
    #[arg(long)]
    pub lambda0: Option<f64>,
    /// Communication range R (m).
    #[arg(long)]
    pub range: Option<f64>,
    /// Obstacle length in metres, or `inf`.
    #[arg(long, conflicts_with = "infinite")]
    pub length: Option<String>,
    /// Infinite-line obstacles (same as `--length inf`).
    #[arg(long)]
    pub infinite: bool,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Anchors needed for localization.
    #[arg(long)]
    pub kmin: Option<u32>,
    /// Obstacle draws for the mean unshadowed area estimate.
    #[arg(long)]
    pub area_draws: Option<u64>,
    /// Probe points per obstacle draw.
    #[arg(long)]
    pub area_probes: Option<u64>,
    /// JSON scenario file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Also write the estimate as a CSV row (`-` for standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// `lambda` or `length`.
    #[arg(long, default_value = "lambda")]
    pub variable: String,
    /// Comma-separated values (`inf` allowed for length).
    #[arg(long)]
    pub values: Option<String>,
    /// `start,stop,count`.
    #[arg(long)]
    pub linspace: Option<String>,
    /// Comma-separated methods: mc, analytic_asymptotic, analytic_independent, mc_independent_segments.
    #[arg(long, default_value = "mc,analytic_asymptotic,analytic_independent")]
    pub methods: String,
    /// Output CSV path, or `-` for standard output.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Args)]
pub struct ValidateCellsArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Number of cells to sample (defaults to --trials).
    #[arg(long)]
    pub samples: Option<u64>,
    /// CSV of sampled areas, or `-` for standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
