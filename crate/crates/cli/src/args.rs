//! Command-line flags. Wavelengths are in nm, lengths in cm, periods in µm.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spdc_design::{Axis, Interaction};

#[derive(Debug, Parser)]
#[command(
    name = "spdc-design",
    version,
    about = "Design and simulate doubly-resonant cavity photon-pair sources"
)]
pub struct Cli {
    /// Worker threads for spectrum, sweep and design computations.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Material catalog overlaid on the built-in entries. Defaults to $SPDC_CATALOG.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Phase and group index of one material axis. Writes --json.
    Dispersion(DispersionArgs),
    /// Finesse, Airy coefficient and emission probability of a cavity. Writes --json.
    Cavity(CavityArgs),
    /// Joint spectral intensity over a signal window. Writes --csv, --json, --plot.
    Spectrum(SpectrumArgs),
    /// Solve a cavity for single-mode operation. Writes --json, --csv, --plot.
    Design(DesignArgs),
    /// Single-mode finesse against signal wavelength, or central peak against
    /// temperature. Writes --csv, --json, --plot.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// SVG figure.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Logarithmic intensity axis in the figure.
    #[arg(long)]
    pub log_y: bool,
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| "expected ordinary or extraordinary".to_string())
}

fn parse_interaction(s: &str) -> Result<Interaction, String> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| "expected type0 (eee) or type2 (eoe)".to_string())
}

#[derive(Debug, Args)]
pub struct DispersionArgs {
    /// Run configuration file; excludes the inline physics flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, conflicts_with = "config")]
    pub material: Option<String>,
    #[arg(long, value_parser = parse_axis, conflicts_with = "config")]
    pub axis: Option<Axis>,
    #[arg(long, conflicts_with = "config")]
    pub wavelength_nm: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub temperature_c: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CavityArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "L-cm", conflicts_with = "config")]
    pub length_cm: Option<f64>,
    /// Input mirror reflectivity [default: 1].
    #[arg(long, conflicts_with = "config")]
    pub r1: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub r2: Option<f64>,
    /// Propagation loss [default: 0].
    #[arg(long, conflicts_with = "config")]
    pub alpha_db_cm: Option<f64>,
    /// Signal group index; with --group-index-idler adds FSR and line width.
    #[arg(long, requires = "group_index_idler", conflicts_with = "config")]
    pub group_index_signal: Option<f64>,
    #[arg(long, requires = "group_index_signal", conflicts_with = "config")]
    pub group_index_idler: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Crystal, phase matching and cavity of a source.
#[derive(Debug, Clone, Default, Args)]
pub struct SourceArgs {
    #[arg(long, conflicts_with = "config")]
    pub material: Option<String>,
    #[arg(long, value_parser = parse_interaction, conflicts_with = "config")]
    pub interaction: Option<Interaction>,
    #[arg(long, conflicts_with = "config")]
    pub pump_nm: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub poling_um: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub temperature_c: Option<f64>,
    #[arg(long = "L-cm", conflicts_with = "config")]
    pub length_cm: Option<f64>,
    /// [default: 1]
    #[arg(long, conflicts_with = "config")]
    pub r1: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub r2: Option<f64>,
    /// [default: 0]
    #[arg(long, conflicts_with = "config")]
    pub alpha_db_cm: Option<f64>,
    /// Drop the phase-matching envelope.
    #[arg(long, conflicts_with = "config")]
    pub no_phasematch: bool,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, conflicts_with = "config")]
    pub from_nm: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub to_nm: Option<f64>,
    /// Relative mode detection threshold [default: 0.1].
    #[arg(long, conflicts_with = "config")]
    pub threshold: Option<f64>,
    /// Gaussian instrument resolution (FWHM) applied before detection.
    #[arg(long, conflicts_with = "config")]
    pub resolution_nm: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub points_per_fwhm: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub max_points: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, conflicts_with = "config")]
    pub material: Option<String>,
    #[arg(long, value_parser = parse_interaction, conflicts_with = "config")]
    pub interaction: Option<Interaction>,
    #[arg(long, conflicts_with = "config")]
    pub pump_nm: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub signal_nm: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub max_length_cm: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub alpha_db_cm: Option<f64>,
    /// [default: 1]
    #[arg(long, conflicts_with = "config")]
    pub r1: Option<f64>,
    /// Detector timing jitter [default: 0].
    #[arg(long, conflicts_with = "config")]
    pub jitter_ps: Option<f64>,
    /// Required finesse over the single-mode minimum [default: 1.2].
    #[arg(long, conflicts_with = "config")]
    pub safety_factor: Option<f64>,
    /// Centre of the temperature search.
    #[arg(long, conflicts_with = "config")]
    pub temperature_c: Option<f64>,
    /// Half width of the temperature search [default: 8].
    #[arg(long, conflicts_with = "config")]
    pub half_width_c: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub max_bandwidth_mhz: Option<f64>,
    /// Fix the length instead of solving for it.
    #[arg(long = "L-cm", conflicts_with = "config")]
    pub length_cm: Option<f64>,
    /// Fix the output coupler instead of solving for it.
    #[arg(long, conflicts_with = "config")]
    pub r2: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Finesse,
    Temperature,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "config")]
    pub kind: Option<SweepKind>,
    #[command(flatten)]
    pub source: SourceArgs,
    /// Signal range start (finesse sweep).
    #[arg(long, conflicts_with = "config")]
    pub from_nm: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub to_nm: Option<f64>,
    /// Signal wavelength (temperature sweep).
    #[arg(long, conflicts_with = "config")]
    pub signal_nm: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub from_c: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub to_c: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    pub points: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}
