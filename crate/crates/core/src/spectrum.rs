//! Doubly-resonant emission spectrum under monochromatic pumping.
//!
//! The spectrum is a function of the signal wavelength only; the idler is
//! fixed by energy conservation. Each grid point carries the three factors
//! whose product is the joint spectral intensity so that exports can show
//! them separately.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cavity::{self, CavityError, CavitySpec};
use crate::dispersion::{
    Axis, DispersionError, EffectiveIndex, MaterialCatalog, WaveguideCorrection,
};
use crate::numeric::sinc;
use crate::SPEED_OF_LIGHT;

/// Minimum grid density, in samples per single-mode FWHM.
pub const MIN_POINTS_PER_FWHM: f64 = 8.0;

/// Adjacent modes further apart than this many signal FSRs start a new cluster.
///
/// Intra-cluster modes sit one FSR apart while inter-cluster gaps are many
/// FSRs wide, so any value in roughly [1.5, 10] gives the same grouping.
pub const CLUSTER_GAP_FSR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Dispersion(#[from] DispersionError),
    #[error(transparent)]
    Cavity(#[from] CavityError),
    #[error(
        "signal wavelength {signal_nm} nm must be longer than the pump wavelength {pump_nm} nm"
    )]
    NonPhysicalSignal { signal_nm: f64, pump_nm: f64 },
    #[error("invalid source: {field} = {value} violates {constraint}")]
    InvalidSource {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("invalid window [{lo_nm}, {hi_nm}] nm: {reason}")]
    InvalidWindow {
        lo_nm: f64,
        hi_nm: f64,
        reason: &'static str,
    },
    #[error("invalid sampling policy: {0}")]
    InvalidPolicy(String),
    #[error("window needs {required} grid points at the requested density but the budget is {budget}; narrow the window or raise max_points")]
    BudgetExceeded { required: usize, budget: usize },
    #[error("relative threshold {0} must lie in (0, 1)")]
    InvalidThreshold(f64),
    #[error("resolution FWHM {fwhm_nm} nm must exceed two grid steps ({step_nm} nm each)")]
    ResolutionTooFine { fwhm_nm: f64, step_nm: f64 },
}

pub type Result<T, E = SpectrumError> = std::result::Result<T, E>;

/// Polarization configuration of the three waves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Interaction {
    /// eee
    #[serde(rename = "type0", alias = "eee")]
    Type0,
    /// eoe
    #[serde(rename = "type2", alias = "eoe")]
    TypeII,
}

impl Interaction {
    pub fn field_axes(self) -> FieldAxes {
        match self {
            Interaction::Type0 => FieldAxes::TYPE_0,
            Interaction::TypeII => FieldAxes::TYPE_II,
        }
    }
}

impl std::fmt::Display for Interaction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Interaction::Type0 => f.write_str("Type 0 (eee)"),
            Interaction::TypeII => f.write_str("Type II (eoe)"),
        }
    }
}

/// Crystal axis seen by each wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldAxes {
    pub pump: Axis,
    pub signal: Axis,
    pub idler: Axis,
}

impl FieldAxes {
    pub const TYPE_0: FieldAxes = FieldAxes {
        pump: Axis::Extraordinary,
        signal: Axis::Extraordinary,
        idler: Axis::Extraordinary,
    };

    /// Default eoe convention: signal ordinary, idler and pump extraordinary.
    pub const TYPE_II: FieldAxes = FieldAxes {
        pump: Axis::Extraordinary,
        signal: Axis::Ordinary,
        idler: Axis::Extraordinary,
    };

    /// Exchanges the signal and idler axes.
    pub fn swapped(self) -> FieldAxes {
        FieldAxes {
            pump: self.pump,
            signal: self.idler,
            idler: self.signal,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldCorrections {
    pub pump: WaveguideCorrection,
    pub signal: WaveguideCorrection,
    pub idler: WaveguideCorrection,
}

fn default_true() -> bool {
    true
}

/// Full device description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub material: String,
    pub interaction: Interaction,
    /// Overrides the interaction's default axis assignment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<FieldAxes>,
    pub pump_wavelength_nm: f64,
    pub poling_period_um: f64,
    pub temperature_c: f64,
    pub cavity: CavitySpec,
    #[serde(default)]
    pub corrections: FieldCorrections,
    /// When false the phase-matching factor is replaced by 1.
    #[serde(default = "default_true")]
    pub include_phasematch: bool,
}

impl SourceSpec {
    pub fn field_axes(&self) -> FieldAxes {
        self.axes.unwrap_or_else(|| self.interaction.field_axes())
    }
}

/// Effective-index models for the three waves.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldModels {
    pub pump: EffectiveIndex,
    pub signal: EffectiveIndex,
    pub idler: EffectiveIndex,
}

impl FieldModels {
    pub fn resolve(
        catalog: &MaterialCatalog,
        material: &str,
        axes: FieldAxes,
        corrections: &FieldCorrections,
    ) -> Result<Self> {
        Ok(Self {
            pump: EffectiveIndex::new(catalog.get(material, axes.pump)?, &corrections.pump)?,
            signal: EffectiveIndex::new(catalog.get(material, axes.signal)?, &corrections.signal)?,
            idler: EffectiveIndex::new(catalog.get(material, axes.idler)?, &corrections.idler)?,
        })
    }

    /// `k_p − k_s − k_i` in rad/m, without the grating term.
    pub fn wavevector_mismatch(
        &self,
        pump_nm: f64,
        signal_nm: f64,
        temperature_c: f64,
    ) -> Result<f64> {
        let idler_nm = idler_wavelength(pump_nm, signal_nm)?;
        let k = |model: &EffectiveIndex, nm: f64| -> Result<f64> {
            Ok(2.0 * PI * model.refractive_index(nm * 1e-3, temperature_c)? / (nm * 1e-9))
        };
        Ok(k(&self.pump, pump_nm)? - k(&self.signal, signal_nm)? - k(&self.idler, idler_nm)?)
    }

    /// Signal and idler group indices at the energy-conserving pair.
    pub fn group_indices(
        &self,
        pump_nm: f64,
        signal_nm: f64,
        temperature_c: f64,
    ) -> Result<(f64, f64)> {
        let idler_nm = idler_wavelength(pump_nm, signal_nm)?;
        Ok((
            self.signal.group_index(signal_nm * 1e-3, temperature_c)?,
            self.idler.group_index(idler_nm * 1e-3, temperature_c)?,
        ))
    }
}

/// `1/λi = 1/λp − 1/λs` (vacuum wavelengths).
pub fn idler_wavelength(pump_nm: f64, signal_nm: f64) -> Result<f64> {
    if !(signal_nm > pump_nm) || !(pump_nm > 0.0) {
        return Err(SpectrumError::NonPhysicalSignal { signal_nm, pump_nm });
    }
    Ok(1.0 / (1.0 / pump_nm - 1.0 / signal_nm))
}

/// `sinc²(Δk L / 2)`; Δk in rad/m, L in cm.
pub fn phasematch_envelope(delta_k: f64, length_cm: f64) -> f64 {
    let s = sinc(delta_k * length_cm * 1e-2 / 2.0);
    s * s
}

/// Per-point factors of the joint spectral intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub lambda_i_nm: f64,
    pub airy_s: f64,
    pub airy_i: f64,
    pub phasematch: f64,
}

impl Components {
    pub fn intensity(&self) -> f64 {
        self.airy_s * self.airy_i * self.phasematch
    }
}

/// A [`SourceSpec`] bound to its dispersion models.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    spec: SourceSpec,
    fields: FieldModels,
    airy_coefficient: f64,
}

impl Source {
    pub fn new(catalog: &MaterialCatalog, spec: SourceSpec) -> Result<Self> {
        let fields = FieldModels::resolve(
            catalog,
            &spec.material,
            spec.field_axes(),
            &spec.corrections,
        )?;
        Self::from_parts(spec, fields)
    }

    pub fn from_parts(spec: SourceSpec, fields: FieldModels) -> Result<Self> {
        if !(spec.pump_wavelength_nm > 0.0) {
            return Err(SpectrumError::InvalidSource {
                field: "pump_wavelength_nm",
                value: spec.pump_wavelength_nm,
                constraint: "> 0",
            });
        }
        if !(spec.poling_period_um > 0.0) {
            return Err(SpectrumError::InvalidSource {
                field: "poling_period_um",
                value: spec.poling_period_um,
                constraint: "> 0",
            });
        }
        let t = spec.temperature_c;
        for model in [&fields.pump, &fields.signal, &fields.idler] {
            let (lo, hi) = model.model().temperature_range_c();
            if !(t >= lo && t <= hi) {
                // surface the model's own range error
                model.refractive_index(model.model().wavelength_range_um().0, t)?;
            }
        }
        let airy_coefficient = spec.cavity.airy_coefficient()?;
        Ok(Self {
            spec,
            fields,
            airy_coefficient,
        })
    }

    pub fn spec(&self) -> &SourceSpec {
        &self.spec
    }

    pub fn fields(&self) -> &FieldModels {
        &self.fields
    }

    pub fn cavity(&self) -> &CavitySpec {
        &self.spec.cavity
    }

    pub fn with_temperature(&self, temperature_c: f64) -> Result<Self> {
        let mut spec = self.spec.clone();
        spec.temperature_c = temperature_c;
        Self::from_parts(spec, self.fields.clone())
    }

    pub fn with_poling_period(&self, poling_period_um: f64) -> Result<Self> {
        let mut spec = self.spec.clone();
        spec.poling_period_um = poling_period_um;
        Self::from_parts(spec, self.fields.clone())
    }

    pub fn with_phasematch(&self, include: bool) -> Self {
        let mut out = self.clone();
        out.spec.include_phasematch = include;
        out
    }

    pub fn idler_wavelength(&self, signal_nm: f64) -> Result<f64> {
        idler_wavelength(self.spec.pump_wavelength_nm, signal_nm)
    }

    /// `Δk = k_p − k_s − k_i − 2π/Λ` in rad/m.
    pub fn phase_mismatch(&self, signal_nm: f64) -> Result<f64> {
        let dk = self.fields.wavevector_mismatch(
            self.spec.pump_wavelength_nm,
            signal_nm,
            self.spec.temperature_c,
        )?;
        Ok(dk - 2.0 * PI / (self.spec.poling_period_um * 1e-6))
    }

    pub fn components(&self, signal_nm: f64) -> Result<Components> {
        let t = self.spec.temperature_c;
        let length = self.spec.cavity.length_cm();
        let idler_nm = self.idler_wavelength(signal_nm)?;
        let n_s = self.fields.signal.refractive_index(signal_nm * 1e-3, t)?;
        let n_i = self.fields.idler.refractive_index(idler_nm * 1e-3, t)?;
        let airy_s = cavity::airy_line(
            self.airy_coefficient,
            cavity::resonance_phase(signal_nm * 1e-3, n_s, length),
        );
        let airy_i = cavity::airy_line(
            self.airy_coefficient,
            cavity::resonance_phase(idler_nm * 1e-3, n_i, length),
        );
        let phasematch = if self.spec.include_phasematch {
            phasematch_envelope(self.phase_mismatch(signal_nm)?, length)
        } else {
            1.0
        };
        Ok(Components {
            lambda_i_nm: idler_nm,
            airy_s,
            airy_i,
            phasematch,
        })
    }

    pub fn joint_spectral_intensity(&self, signal_nm: f64) -> Result<f64> {
        Ok(self.components(signal_nm)?.intensity())
    }

    pub fn group_indices(&self, signal_nm: f64) -> Result<(f64, f64)> {
        self.fields.group_indices(
            self.spec.pump_wavelength_nm,
            signal_nm,
            self.spec.temperature_c,
        )
    }

    pub fn mode_figures(&self, signal_nm: f64) -> Result<cavity::ModeFigures> {
        let (n_s, n_i) = self.group_indices(signal_nm)?;
        let length = self.spec.cavity.length_cm();
        Ok(cavity::ModeFigures::new(
            cavity::free_spectral_range(length, n_s),
            cavity::free_spectral_range(length, n_i),
            self.spec.cavity.finesse()?,
        ))
    }

    /// Signal free spectral range expressed as a wavelength interval at `signal_nm`.
    pub fn signal_fsr_nm(&self, signal_nm: f64) -> Result<f64> {
        let n_s = self
            .fields
            .signal
            .group_index(signal_nm * 1e-3, self.spec.temperature_c)?;
        Ok(signal_nm * signal_nm / (2.0 * n_s * self.spec.cavity.length_cm() * 1e7))
    }
}

pub fn phase_mismatch(source: &Source, signal_nm: f64) -> Result<f64> {
    source.phase_mismatch(signal_nm)
}

pub fn joint_spectral_intensity(source: &Source, signal_nm: f64) -> Result<f64> {
    source.joint_spectral_intensity(signal_nm)
}

/// Grid density and size budget for [`compute_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingPolicy {
    pub points_per_fwhm: f64,
    pub max_points: usize,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        Self {
            points_per_fwhm: MIN_POINTS_PER_FWHM,
            max_points: 20_000_000,
        }
    }
}

/// How a spectrum was produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub source: SourceSpec,
    pub window_nm: (f64, f64),
    pub policy: SamplingPolicy,
    /// Uniform frequency spacing of the grid.
    pub frequency_step_hz: f64,
    /// Single-mode FWHM estimate the step was derived from.
    pub mode_fwhm_hz: f64,
    /// Gaussian resolution applied after sampling, if any.
    pub resolution_fwhm_nm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpectrum {
    /// Strictly increasing signal wavelengths, uniform in frequency.
    pub grid_nm: Vec<f64>,
    pub values: Vec<f64>,
    /// Per-point factors; dropped once the spectrum is convolved.
    pub components: Option<Vec<Components>>,
    pub provenance: Provenance,
}

impl SampledSpectrum {
    pub fn len(&self) -> usize {
        self.grid_nm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid_nm.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Riemann sum over the (uniform) frequency grid, in Hz.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.provenance.frequency_step_hz
    }

    pub fn idler_nm(&self, index: usize) -> f64 {
        match &self.components {
            Some(c) => c[index].lambda_i_nm,
            None => {
                let pump = self.provenance.source.pump_wavelength_nm;
                1.0 / (1.0 / pump - 1.0 / self.grid_nm[index])
            }
        }
    }
}

/// Samples the spectrum over `window_nm` on a grid uniform in frequency.
pub fn compute_spectrum(
    source: &Source,
    window_nm: (f64, f64),
    policy: SamplingPolicy,
) -> Result<SampledSpectrum> {
    let (lo, hi) = window_nm;
    if !(hi > lo) {
        return Err(SpectrumError::InvalidWindow {
            lo_nm: lo,
            hi_nm: hi,
            reason: "expected lo < hi",
        });
    }
    if !(lo > source.spec.pump_wavelength_nm) {
        return Err(SpectrumError::InvalidWindow {
            lo_nm: lo,
            hi_nm: hi,
            reason: "window must lie on the signal side of the pump",
        });
    }
    if !(policy.points_per_fwhm >= MIN_POINTS_PER_FWHM) {
        return Err(SpectrumError::InvalidPolicy(format!(
            "points_per_fwhm = {} is below the minimum of {MIN_POINTS_PER_FWHM}",
            policy.points_per_fwhm
        )));
    }
    let center = 0.5 * (lo + hi);
    let mode_fwhm_hz = source.mode_figures(center)?.mode_bandwidth_hz;
    let nu_hi = SPEED_OF_LIGHT / (lo * 1e-9);
    let nu_lo = SPEED_OF_LIGHT / (hi * 1e-9);
    let target_step = mode_fwhm_hz / policy.points_per_fwhm;
    let intervals = ((nu_hi - nu_lo) / target_step).ceil();
    let required = intervals as usize + 1;
    if !intervals.is_finite() || required > policy.max_points {
        return Err(SpectrumError::BudgetExceeded {
            required,
            budget: policy.max_points,
        });
    }
    let step = (nu_hi - nu_lo) / intervals;
    let grid_nm: Vec<f64> = (0..required)
        .map(|j| {
            if j == 0 {
                lo
            } else if j + 1 == required {
                hi
            } else {
                SPEED_OF_LIGHT / (nu_hi - j as f64 * step) * 1e9
            }
        })
        .collect();
    let components = grid_nm
        .par_iter()
        .map(|&nm| source.components(nm))
        .collect::<Result<Vec<_>>>()?;
    let values = components.iter().map(Components::intensity).collect();
    Ok(SampledSpectrum {
        grid_nm,
        values,
        components: Some(components),
        provenance: Provenance {
            source: source.spec.clone(),
            window_nm,
            policy,
            frequency_step_hz: step,
            mode_fwhm_hz,
            resolution_fwhm_nm: None,
        },
    })
}

/// A detected emission mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModePeak {
    pub center_nm: f64,
    pub height: f64,
    pub fwhm_nm: f64,
}

/// Local maxima above `relative_threshold · max`, with parabolic centre
/// refinement and interpolated half-height widths.
///
/// A maximum that lies inside the half-height span of a taller one is a
/// shoulder of that mode and is not reported separately. Flat tops resolve
/// to their centroid. Maxima on the first or last grid point are skipped.
pub fn detect_modes(spectrum: &SampledSpectrum, relative_threshold: f64) -> Result<Vec<ModePeak>> {
    if !(relative_threshold > 0.0 && relative_threshold < 1.0) {
        return Err(SpectrumError::InvalidThreshold(relative_threshold));
    }
    let v = &spectrum.values;
    let g = &spectrum.grid_nm;
    let n = v.len();
    let max = spectrum.max_value();
    if n < 3 || !(max > 0.0) {
        return Ok(Vec::new());
    }
    let threshold = relative_threshold * max;

    // (first, last) index of each strict local maximum or plateau top
    let mut tops = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if v[i] > v[i - 1] {
            let mut j = i;
            while j + 1 < n && v[j + 1] == v[i] {
                j += 1;
            }
            if j + 1 < n && v[j + 1] < v[i] && v[i] >= threshold {
                tops.push((i, j));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    tops.sort_by(|a, b| v[b.0].total_cmp(&v[a.0]).then(a.0.cmp(&b.0)));

    let position = |x: f64| -> f64 {
        let k = (x.floor() as usize).min(n - 2);
        let t = x - k as f64;
        g[k] + t * (g[k + 1] - g[k])
    };
    let crossing = |below: usize, above: usize, half: f64| -> f64 {
        let t = (half - v[below]) / (v[above] - v[below]);
        g[below] + t * (g[above] - g[below])
    };

    let mut accepted: BTreeSet<usize> = BTreeSet::new();
    let mut peaks = Vec::new();
    for (a, b) in tops {
        let (center_idx, height) = if a == b {
            let (y0, y1, y2) = (v[a - 1], v[a], v[a + 1]);
            let denom = y0 - 2.0 * y1 + y2;
            let offset = if denom < 0.0 {
                0.5 * (y0 - y2) / denom
            } else {
                0.0
            };
            let offset = offset.clamp(-0.5, 0.5);
            (a as f64 + offset, (y1 - 0.25 * (y0 - y2) * offset).max(y1))
        } else {
            (0.5 * (a + b) as f64, v[a])
        };
        let height = height.min(1.0);
        let half = 0.5 * height;
        let mut left = a;
        while left > 0 && v[left - 1] >= half {
            left -= 1;
        }
        let mut right = b;
        while right + 1 < n && v[right + 1] >= half {
            right += 1;
        }
        if accepted.range(left..=right).next().is_some() {
            continue;
        }
        accepted.insert(a);
        let lambda_left = if left == 0 {
            g[0]
        } else {
            crossing(left - 1, left, half)
        };
        let lambda_right = if right + 1 == n {
            g[n - 1]
        } else {
            crossing(right + 1, right, half)
        };
        peaks.push(ModePeak {
            center_nm: position(center_idx),
            height,
            fwhm_nm: lambda_right - lambda_left,
        });
    }
    peaks.sort_by(|p, q| p.center_nm.total_cmp(&q.center_nm));
    Ok(peaks)
}

/// A group of modes separated by at most [`CLUSTER_GAP_FSR`] signal FSRs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub modes: Vec<ModePeak>,
    /// Height-weighted mean of the member centres.
    pub center_nm: f64,
    pub span_nm: f64,
}

impl Cluster {
    fn from_modes(modes: Vec<ModePeak>) -> Self {
        let weight: f64 = modes.iter().map(|m| m.height).sum();
        let center_nm = modes.iter().map(|m| m.height * m.center_nm).sum::<f64>() / weight;
        let span_nm = modes.last().unwrap().center_nm - modes[0].center_nm;
        Self {
            modes,
            center_nm,
            span_nm,
        }
    }

    pub fn peak_height(&self) -> f64 {
        self.modes.iter().map(|m| m.height).fold(0.0, f64::max)
    }
}

pub fn group_clusters(modes: &[ModePeak], source: &Source) -> Result<Vec<Cluster>> {
    let mut sorted = modes.to_vec();
    sorted.sort_by(|p, q| p.center_nm.total_cmp(&q.center_nm));
    let mut clusters = Vec::new();
    let mut current: Vec<ModePeak> = Vec::new();
    for mode in sorted {
        if let Some(last) = current.last() {
            let gap = mode.center_nm - last.center_nm;
            let midpoint = 0.5 * (mode.center_nm + last.center_nm);
            if gap > CLUSTER_GAP_FSR * source.signal_fsr_nm(midpoint)? {
                clusters.push(Cluster::from_modes(std::mem::take(&mut current)));
            }
        }
        current.push(mode);
    }
    if !current.is_empty() {
        clusters.push(Cluster::from_modes(current));
    }
    Ok(clusters)
}

/// Gaussian instrument response of the given FWHM.
///
/// The kernel width is converted to frequency at the window centre and
/// applied on the uniform frequency grid. Each input sample's weight is
/// renormalised over the part of the kernel that lands on the grid, so the
/// frequency integral is preserved exactly.
pub fn convolve_resolution(spectrum: &SampledSpectrum, fwhm_nm: f64) -> Result<SampledSpectrum> {
    let n = spectrum.len();
    let step_hz = spectrum.provenance.frequency_step_hz;
    let center_nm = spectrum.grid_nm[n / 2];
    let step_nm = center_nm * center_nm * 1e-9 * step_hz / SPEED_OF_LIGHT;
    if !(fwhm_nm > 2.0 * step_nm) {
        return Err(SpectrumError::ResolutionTooFine { fwhm_nm, step_nm });
    }
    let fwhm_hz = SPEED_OF_LIGHT * fwhm_nm * 1e-9 / (center_nm * 1e-9 * center_nm * 1e-9);
    let sigma = fwhm_hz / (2.0 * (2.0 * 2f64.ln()).sqrt()) / step_hz;
    let half = ((6.0 * sigma).ceil() as usize).min(n);
    let mut kernel: Vec<f64> = (0..=2 * half)
        .map(|m| {
            let x = m as f64 - half as f64;
            (-0.5 * x * x / (sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= total);

    // fraction of each sample's kernel that lands inside the grid
    let mut prefix = vec![0.0; kernel.len() + 1];
    for (m, k) in kernel.iter().enumerate() {
        prefix[m + 1] = prefix[m] + k;
    }
    let scaled: Vec<f64> = (0..n)
        .map(|k| {
            // output j = k + (m - half) must satisfy 0 <= j < n
            let m_lo = half.saturating_sub(k);
            let m_hi = (n - 1 - k + half).min(2 * half);
            spectrum.values[k] / (prefix[m_hi + 1] - prefix[m_lo])
        })
        .collect();

    let size = (n + 2 * half).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let mut a: Vec<Complex<f64>> = scaled.iter().map(|&x| Complex::new(x, 0.0)).collect();
    a.resize(size, Complex::new(0.0, 0.0));
    let mut b: Vec<Complex<f64>> = kernel.iter().map(|&x| Complex::new(x, 0.0)).collect();
    b.resize(size, Complex::new(0.0, 0.0));
    forward.process(&mut a);
    forward.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inverse.process(&mut a);
    let norm = 1.0 / size as f64;
    let values: Vec<f64> = (0..n).map(|j| (a[j + half].re * norm).max(0.0)).collect();

    let mut provenance = spectrum.provenance.clone();
    provenance.resolution_fwhm_nm = Some(fwhm_nm);
    Ok(SampledSpectrum {
        grid_nm: spectrum.grid_nm.clone(),
        values,
        components: None,
        provenance,
    })
}
