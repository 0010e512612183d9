//! Simulation and inverse design of doubly-resonant cavity-waveguide
//! photon-pair sources.
//!
//! Units follow the lab conventions used throughout: wavelengths in nm at
//! the spectrum and design level (µm inside the Sellmeier models), lengths
//! in cm, poling periods in µm, temperatures in °C, losses in dB/cm.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod designer;
pub mod dispersion;
pub mod numeric;
pub mod report;
pub mod spectrum;

pub use cavity::{CavityError, CavitySpec, ModeFigures};
pub use designer::{DesignError, DesignGoal, DesignResult, Objective};
pub use dispersion::{
    Axis, CatalogSource, DispersionError, DispersionModel, EffectiveIndex, MaterialCatalog,
    SellmeierForm, WaveguideCorrection,
};
pub use report::{ClusterRecord, ModeRecord};
pub use spectrum::{
    Cluster, FieldAxes, FieldCorrections, FieldModels, Interaction, ModePeak, SampledSpectrum,
    SamplingPolicy, Source, SourceSpec, SpectrumError,
};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
