//! Run configuration files and the parameter records of each command.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spdc_design::{
    Axis, CavitySpec, ClusterRecord, DesignGoal, DesignResult, FieldAxes, FieldCorrections,
    Interaction, SamplingPolicy, SourceSpec, WaveguideCorrection,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Dispersion,
    Cavity,
    Spectrum,
    Design,
    Sweep,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Dispersion => "dispersion",
            CommandKind::Cavity => "cavity",
            CommandKind::Spectrum => "spectrum",
            CommandKind::Design => "design",
            CommandKind::Sweep => "sweep",
        }
    }
}

/// Artifact paths. Which of them a command writes is listed in its help.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
    #[serde(default)]
    pub plot_log_scale: bool,
}

/// One JSON document describing a complete run.
///
/// `parameters` is checked against the record of `command` once the
/// command is known, so unknown fields are rejected at both levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    pub parameters: serde_json::Value,
    #[serde(default)]
    pub output: Outputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::from_json_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    pub fn parameters<T: serde::de::DeserializeOwned>(&self) -> Result<T, String> {
        serde_json::from_value(self.parameters.clone())
            .map_err(|e| format!("{} parameters: {e}", self.command.name()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionParams {
    pub material: String,
    pub axis: Axis,
    pub wavelength_nm: f64,
    pub temperature_c: f64,
    #[serde(default)]
    pub correction: WaveguideCorrection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityParams {
    pub cavity: CavitySpec,
    /// With both group indices the mode figures are reported too.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_index_signal: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_index_idler: Option<f64>,
}

fn default_threshold() -> f64 {
    spdc_design::designer::VERIFICATION_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub source: SourceSpec,
    pub window_nm: (f64, f64),
    #[serde(default)]
    pub sampling: SamplingPolicy,
    /// Relative mode detection threshold.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Gaussian instrument response applied before detection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution_fwhm_nm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepParams {
    /// Single-mode finesse across a signal range.
    Finesse {
        material: String,
        interaction: Interaction,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        axes: Option<FieldAxes>,
        pump_wavelength_nm: f64,
        signal_range_nm: (f64, f64),
        points: usize,
        temperature_c: f64,
        #[serde(default)]
        corrections: FieldCorrections,
    },
    /// Strongest doubly-resonant peak near `signal_nm` across temperature.
    Temperature {
        source: SourceSpec,
        signal_nm: f64,
        temperature_range_c: (f64, f64),
        points: usize,
    },
}

/// Written by `dispersion`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionReport {
    pub parameters: DispersionParams,
    pub phase_index: f64,
    pub group_index: f64,
    pub citation: String,
}

/// Written by `cavity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityReport {
    pub parameters: CavityParams,
    pub round_trip_factor: f64,
    pub finesse: f64,
    pub airy_coefficient: f64,
    pub p_out: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<ModeReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeReport {
    pub fsr_signal_ghz: f64,
    pub fsr_idler_ghz: f64,
    pub mode_bandwidth_mhz: f64,
    pub coherence_time_ns: f64,
}

/// Written by `spectrum`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumReport {
    pub parameters: SpectrumParams,
    pub points: usize,
    pub frequency_step_hz: f64,
    pub mode_fwhm_hz: f64,
    pub max_value: f64,
    pub clusters: Vec<ClusterRecord>,
}

/// Written by `design`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignReport {
    pub goal: DesignGoal,
    pub result: DesignResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub x: f64,
    /// `None` where the quantity is undefined.
    pub y: Option<f64>,
}

/// Written by `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepReport {
    pub parameters: SweepParams,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<SweepPoint>,
}
