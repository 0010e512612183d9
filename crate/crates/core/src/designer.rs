//! Inverse design: mode counting, poling-period and temperature solves,
//! and cavity parameters that keep every cluster single-mode.
//!
//! The procedure in [`design_cavity`] reads the design target as follows.
//! The cavity length is the shortest one meeting the optional bandwidth
//! target, up to `max_length_cm`; the output coupler R2 is solved so that the
//! finesse equals `finesse_safety_factor · F_{M=1}`. Either may be pinned
//! instead. This is one defensible reading of a procedure that published
//! designs usually state only by example.

use std::cell::RefCell;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cavity::{self, CavityError, CavitySpec};
use crate::dispersion::{DispersionError, MaterialCatalog};
use crate::numeric::bisect;
use crate::report::{cluster_report, ClusterRecord};
use crate::spectrum::{
    self, Cluster, FieldAxes, FieldCorrections, FieldModels, Interaction, SamplingPolicy, Source,
    SourceSpec, SpectrumError,
};
use crate::SPEED_OF_LIGHT;

/// Largest temperature step of [`tune_temperature`].
pub const TEMPERATURE_STEP_C: f64 = 0.005;

/// Relative detection threshold used when verifying a design.
pub const VERIFICATION_THRESHOLD: f64 = 0.1;

/// Central-cluster decision level for [`tune_temperature`].
pub const CLUSTER_DECISION_LEVEL: f64 = 0.5;

/// Half-width, in signal FSRs, of the window probed around the target wavelength.
pub const CENTRAL_WINDOW_FSR: f64 = 2.0;

const R2_TOLERANCE: f64 = 1e-9;

/// Temperature samples used to find the sizing worst case.
const SIZING_SAMPLES: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Cavity(#[from] CavityError),
    #[error("degenerate dispersion: N_s = {n_s} and N_i = {n_i} coincide, clusters do not form")]
    DegenerateDispersion { n_s: f64, n_i: f64 },
    #[error("{field} = {value} violates {constraint}")]
    InvalidArgument {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("no first-order quasi-phase-matching: k_p - k_s - k_i = {mismatch_per_m} rad/m is not positive")]
    NoFirstOrderQpm { mismatch_per_m: f64 },
    #[error("{objective:?} not reached in [{lo_c}, {hi_c}] °C; best candidate {best_temperature_c} °C with central peak {best_peak}")]
    ObjectiveNotFound {
        objective: Objective,
        lo_c: f64,
        hi_c: f64,
        best_temperature_c: f64,
        best_peak: f64,
    },
    #[error("no output coupler reaches finesse {target_finesse}: {reason}")]
    CoatingInfeasible {
        target_finesse: f64,
        reason: &'static str,
    },
    #[error("finesse {finesse} is below the required {required}")]
    FinesseBelowTarget { finesse: f64, required: f64 },
    #[error(
        "bandwidth target {target_mhz} MHz needs more than the maximum length {max_length_cm} cm"
    )]
    BandwidthUnreachable { target_mhz: f64, max_length_cm: f64 },
    #[error("design infeasible: a cluster at {:.3} nm holds {} modes", .cluster.center_nm, .cluster.modes.len())]
    DesignInfeasible { cluster: Cluster },
}

impl From<DispersionError> for DesignError {
    fn from(e: DispersionError) -> Self {
        DesignError::Spectrum(SpectrumError::Dispersion(e))
    }
}

pub type Result<T, E = DesignError> = std::result::Result<T, E>;

/// `M = |N_s + N_i| / (2 F |N_s − N_i|)`, unrounded.
pub fn mode_count(finesse: f64, n_s: f64, n_i: f64) -> Result<f64> {
    if !(finesse > 0.0) {
        return Err(DesignError::InvalidArgument {
            field: "finesse",
            value: finesse,
            constraint: "> 0",
        });
    }
    Ok(single_mode_finesse_from(n_s, n_i)? / finesse)
}

fn single_mode_finesse_from(n_s: f64, n_i: f64) -> Result<f64> {
    let diff = (n_s - n_i).abs();
    if diff <= 1e-12 * (n_s.abs() + n_i.abs()) {
        return Err(DesignError::DegenerateDispersion { n_s, n_i });
    }
    Ok((n_s + n_i).abs() / (2.0 * diff))
}

/// Finesse at which a cluster holds exactly one mode: `|N_s + N_i| / (2|N_s − N_i|)`.
pub fn min_single_mode_finesse(
    fields: &FieldModels,
    signal_nm: f64,
    pump_nm: f64,
    temperature_c: f64,
) -> Result<f64> {
    let (n_s, n_i) = fields.group_indices(pump_nm, signal_nm, temperature_c)?;
    single_mode_finesse_from(n_s, n_i)
}

/// Vernier period of the signal and idler combs, as a signal wavelength interval in nm.
pub fn cluster_spacing_nm(
    fields: &FieldModels,
    signal_nm: f64,
    pump_nm: f64,
    temperature_c: f64,
    length_cm: f64,
) -> Result<f64> {
    let (n_s, n_i) = fields.group_indices(pump_nm, signal_nm, temperature_c)?;
    let diff = (n_s - n_i).abs();
    if diff == 0.0 {
        return Err(DesignError::DegenerateDispersion { n_s, n_i });
    }
    Ok(signal_nm * signal_nm / (2.0 * length_cm * 1e7 * diff))
}

/// First-order period `Λ = 2π / (k_p − k_s − k_i)` in µm.
pub fn solve_poling_period(
    fields: &FieldModels,
    pump_nm: f64,
    signal_nm: f64,
    temperature_c: f64,
) -> Result<f64> {
    let mismatch = fields.wavevector_mismatch(pump_nm, signal_nm, temperature_c)?;
    if !(mismatch > 0.0) {
        return Err(DesignError::NoFirstOrderQpm {
            mismatch_per_m: mismatch,
        });
    }
    Ok(2.0 * PI / mismatch * 1e6)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    CentralClusterPresent,
    CentralClusterAbsent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuneOutcome {
    pub temperature_c: f64,
    pub central_peak: f64,
}

/// Largest `S` within [`CENTRAL_WINDOW_FSR`] signal FSRs of `signal_nm`.
pub fn central_peak(source: &Source, signal_nm: f64) -> Result<f64> {
    let half = CENTRAL_WINDOW_FSR * source.signal_fsr_nm(signal_nm)?;
    let spectrum = spectrum::compute_spectrum(
        source,
        (signal_nm - half, signal_nm + half),
        SamplingPolicy::default(),
    )?;
    Ok(spectrum.max_value())
}

/// Scans `window_c` at steps of at most [`TEMPERATURE_STEP_C`] for the
/// temperature that maximizes (or minimizes) the central-cluster peak.
///
/// `CentralClusterPresent` succeeds when the best peak reaches
/// [`CLUSTER_DECISION_LEVEL`]; `CentralClusterAbsent` when the lowest peak is
/// at most that fraction of the largest peak in the scan. Near-equal
/// candidates go to the one closest to the window centre.
pub fn tune_temperature(
    source: &Source,
    signal_nm: f64,
    window_c: (f64, f64),
    objective: Objective,
) -> Result<TuneOutcome> {
    let (lo, hi) = window_c;
    if !(hi >= lo) {
        return Err(DesignError::InvalidArgument {
            field: "temperature window upper bound",
            value: hi,
            constraint: ">= lower bound",
        });
    }
    let steps = ((hi - lo) / TEMPERATURE_STEP_C).ceil() as usize;
    let temperatures: Vec<f64> = if steps == 0 {
        vec![lo]
    } else {
        (0..=steps)
            .map(|j| lo + (hi - lo) * j as f64 / steps as f64)
            .collect()
    };
    let peaks = temperatures
        .par_iter()
        .map(|&t| central_peak(&source.with_temperature(t)?, signal_nm))
        .collect::<Result<Vec<f64>>>()?;

    let center = 0.5 * (lo + hi);
    let better = |a: f64, b: f64| match objective {
        Objective::CentralClusterPresent => a > b,
        Objective::CentralClusterAbsent => a < b,
    };
    let mut extreme = peaks[0];
    for &p in &peaks {
        if better(p, extreme) {
            extreme = p;
        }
    }
    let tie = 1e-12 * extreme.abs();
    let (temperature_c, central_peak) = temperatures
        .iter()
        .zip(&peaks)
        .filter(|(_, &p)| (p - extreme).abs() <= tie)
        .map(|(&t, &p)| (t, p))
        .min_by(|a, b| (a.0 - center).abs().total_cmp(&(b.0 - center).abs()))
        .expect("at least one candidate");

    let reached = match objective {
        Objective::CentralClusterPresent => central_peak >= CLUSTER_DECISION_LEVEL,
        Objective::CentralClusterAbsent => {
            let max = peaks.iter().copied().fold(0.0, f64::max);
            central_peak <= CLUSTER_DECISION_LEVEL * max
        }
    };
    if !reached {
        return Err(DesignError::ObjectiveNotFound {
            objective,
            lo_c: lo,
            hi_c: hi,
            best_temperature_c: temperature_c,
            best_peak: central_peak,
        });
    }
    Ok(TuneOutcome {
        temperature_c,
        central_peak,
    })
}

fn default_r1() -> f64 {
    1.0
}

fn default_safety() -> f64 {
    1.2
}

fn default_half_width() -> f64 {
    8.0
}

/// Design inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignGoal {
    pub material: String,
    pub interaction: Interaction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<FieldAxes>,
    pub pump_wavelength_nm: f64,
    pub target_signal_nm: f64,
    pub max_length_cm: f64,
    pub alpha_db_cm: f64,
    #[serde(default = "default_r1")]
    pub r1: f64,
    #[serde(default)]
    pub detector_jitter_ps: f64,
    #[serde(default = "default_safety")]
    pub finesse_safety_factor: f64,
    /// Centre of the temperature search.
    pub nominal_temperature_c: f64,
    #[serde(default = "default_half_width")]
    pub temperature_half_width_c: f64,
    /// Largest acceptable single-mode bandwidth; sets the shortest usable length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_mode_bandwidth_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinned_length_cm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinned_r2: Option<f64>,
    #[serde(default)]
    pub corrections: FieldCorrections,
}

impl DesignGoal {
    pub fn field_axes(&self) -> FieldAxes {
        self.axes.unwrap_or_else(|| self.interaction.field_axes())
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (
                "pump_wavelength_nm",
                self.pump_wavelength_nm,
                self.pump_wavelength_nm > 0.0,
                "> 0",
            ),
            (
                "target_signal_nm",
                self.target_signal_nm,
                self.target_signal_nm > self.pump_wavelength_nm,
                "> pump_wavelength_nm",
            ),
            (
                "max_length_cm",
                self.max_length_cm,
                self.max_length_cm > 0.0,
                "> 0",
            ),
            (
                "alpha_db_cm",
                self.alpha_db_cm,
                self.alpha_db_cm >= 0.0,
                ">= 0",
            ),
            (
                "r1",
                self.r1,
                self.r1 > 0.0 && self.r1 <= 1.0,
                "0 < R1 <= 1",
            ),
            (
                "detector_jitter_ps",
                self.detector_jitter_ps,
                self.detector_jitter_ps >= 0.0,
                ">= 0",
            ),
            (
                "finesse_safety_factor",
                self.finesse_safety_factor,
                self.finesse_safety_factor >= 1.0,
                ">= 1",
            ),
            (
                "temperature_half_width_c",
                self.temperature_half_width_c,
                self.temperature_half_width_c >= 0.0,
                ">= 0",
            ),
        ];
        for (field, value, ok, constraint) in checks {
            if !ok || !value.is_finite() {
                return Err(DesignError::InvalidArgument {
                    field,
                    value,
                    constraint,
                });
            }
        }
        if let Some(l) = self.pinned_length_cm {
            if !(l > 0.0 && l <= self.max_length_cm) {
                return Err(DesignError::InvalidArgument {
                    field: "pinned_length_cm",
                    value: l,
                    constraint: "0 < L <= max_length_cm",
                });
            }
        }
        if let Some(r2) = self.pinned_r2 {
            if !(r2 > 0.0 && r2 < 1.0) {
                return Err(DesignError::InvalidArgument {
                    field: "pinned_r2",
                    value: r2,
                    constraint: "0 < R2 < 1",
                });
            }
        }
        if let Some(b) = self.max_mode_bandwidth_mhz {
            if !(b > 0.0) {
                return Err(DesignError::InvalidArgument {
                    field: "max_mode_bandwidth_mhz",
                    value: b,
                    constraint: "> 0",
                });
            }
        }
        Ok(())
    }

    /// The device a [`DesignResult`] describes.
    pub fn source_spec(&self, result: &DesignResult) -> Result<SourceSpec> {
        Ok(SourceSpec {
            material: self.material.clone(),
            interaction: self.interaction,
            axes: self.axes,
            pump_wavelength_nm: self.pump_wavelength_nm,
            poling_period_um: result.poling_period_um,
            temperature_c: result.temperature_c,
            cavity: result.cavity()?,
            corrections: self.corrections.clone(),
            include_phasematch: true,
        })
    }
}

/// Design outputs; JSON field names carry their units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignResult {
    pub length_cm: f64,
    pub r1: f64,
    pub r2: f64,
    pub alpha_db_cm: f64,
    pub poling_period_um: f64,
    pub temperature_c: f64,
    pub finesse: f64,
    pub m_min_finesse: f64,
    pub mode_count: f64,
    pub mode_bandwidth_mhz: f64,
    pub mode_bandwidth_pm: f64,
    pub coherence_time_ns: f64,
    pub p_out: f64,
    pub cluster_spacing_nm: f64,
    pub resolvable: bool,
    /// Phase-matching main lobe the verification spectrum covers.
    pub main_lobe_nm: (f64, f64),
    pub clusters: Vec<ClusterRecord>,
}

impl DesignResult {
    pub fn cavity(&self) -> Result<CavitySpec> {
        Ok(CavitySpec::new(
            self.length_cm,
            self.r1,
            self.r2,
            self.alpha_db_cm,
        )?)
    }
}

/// `jitter < 1/(πΔν)`; jitter in seconds.
pub fn resolvability_check(mode_bandwidth_hz: f64, jitter_s: f64) -> bool {
    jitter_s < cavity::coherence_time(mode_bandwidth_hz)
}

/// Finesse as a function of R2, with an undefined finesse read as 0.
fn finesse_or_limit(spec: &CavitySpec) -> f64 {
    match spec.finesse() {
        Ok(f) => f,
        Err(CavityError::InfiniteFinesse) => f64::INFINITY,
        Err(_) => 0.0,
    }
}

/// R2 giving `target` finesse for the other parameters of `base`.
pub fn solve_output_coupler(base: &CavitySpec, target: f64) -> Result<f64> {
    let hi = 1.0 - 1e-15;
    let at = |r2: f64| {
        base.with_r2(r2)
            .map(|s| finesse_or_limit(&s))
            .unwrap_or(0.0)
    };
    if at(hi) < target {
        return Err(DesignError::CoatingInfeasible {
            target_finesse: target,
            reason:
                "mirror R1 and propagation loss cap the finesse below the target even with R2 -> 1",
        });
    }
    let root = bisect(|r2| at(r2) - target, 0.0, hi, R2_TOLERANCE).ok_or(
        DesignError::CoatingInfeasible {
            target_finesse: target,
            reason: "no sign change in finesse over R2 in (0, 1)",
        },
    )?;
    // step to the side of the bracket that meets the target
    Ok((root + R2_TOLERANCE).min(hi))
}

/// Signal wavelengths where `|Δk| L / 2 = π` on either side of `signal_nm`.
pub fn main_lobe(source: &Source, signal_nm: f64) -> Result<(f64, f64)> {
    let length_m = source.cavity().length_cm() * 1e-2;
    let excess =
        |nm: f64| -> Result<f64> { Ok(source.phase_mismatch(nm)?.abs() * length_m / 2.0 - PI) };
    let pump = source.spec().pump_wavelength_nm;
    let mut edges = [0.0; 2];
    for (slot, direction) in edges.iter_mut().zip([-1.0, 1.0]) {
        let mut inner = signal_nm;
        let mut step = 0.05;
        let outer = loop {
            let candidate = signal_nm + direction * step;
            if direction < 0.0 && candidate <= pump * 1.0001 {
                return Err(DesignError::InvalidArgument {
                    field: "target_signal_nm",
                    value: signal_nm,
                    constraint: "main lobe must close before the pump wavelength",
                });
            }
            if excess(candidate)? >= 0.0 {
                break candidate;
            }
            inner = candidate;
            step *= 2.0;
        };
        let failure = RefCell::new(None);
        let root = bisect(
            |nm| match excess(nm) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            inner,
            outer,
            1e-9,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        *slot = root.expect("bracketed by construction");
    }
    Ok((edges[0], edges[1]))
}

/// Full design procedure.
///
/// 1. `F_{M=1}` and group indices at the target, worst case over the temperature window.
/// 2. Length: pinned, else the shortest meeting `max_mode_bandwidth_mhz`, else `max_length_cm`.
/// 3. R2: pinned, else solved for `finesse_safety_factor · F_{M=1}`.
/// 4. Λ at the nominal temperature, temperature tuned for a central cluster
///    with the envelope off, then Λ re-solved at the tuned temperature.
/// 5. The spectrum over the phase-matching main lobe must show only
///    single-mode clusters.
pub fn design_cavity(catalog: &MaterialCatalog, goal: &DesignGoal) -> Result<DesignResult> {
    goal.validate()?;
    let fields = FieldModels::resolve(
        catalog,
        &goal.material,
        goal.field_axes(),
        &goal.corrections,
    )?;
    let pump = goal.pump_wavelength_nm;
    let target = goal.target_signal_nm;
    let t_nominal = goal.nominal_temperature_c;

    // size the cavity for the worst case over the search window so that both
    // targets still hold wherever the tuning lands
    let half = goal.temperature_half_width_c;
    let mut f_single = 0.0f64;
    let mut inverse_group_sum = 0.0f64;
    for k in 0..=SIZING_SAMPLES {
        let t = t_nominal - half + 2.0 * half * k as f64 / SIZING_SAMPLES as f64;
        f_single = f_single.max(min_single_mode_finesse(&fields, target, pump, t)?);
        let (n_s, n_i) = fields.group_indices(pump, target, t)?;
        inverse_group_sum = inverse_group_sum.max(1.0 / n_s + 1.0 / n_i);
    }
    let required = goal.finesse_safety_factor * f_single;

    let cavity_at = |length_cm: f64| -> Result<CavitySpec> {
        let base = CavitySpec::new(
            length_cm,
            goal.r1,
            goal.pinned_r2.unwrap_or(0.5),
            goal.alpha_db_cm,
        )?;
        match goal.pinned_r2 {
            Some(_) => Ok(base),
            None => Ok(base.with_r2(solve_output_coupler(&base, required)?)?),
        }
    };
    let bandwidth_at = |length_cm: f64| -> Result<f64> {
        let f = cavity_at(length_cm)?.finesse()?;
        // (FSR_s + FSR_i) / 2F with FSR = c / 2NL
        Ok(SPEED_OF_LIGHT * inverse_group_sum / (4.0 * length_cm * 1e-2 * f))
    };
    let length_cm = match (goal.pinned_length_cm, goal.max_mode_bandwidth_mhz) {
        (Some(l), _) => l,
        (None, None) => goal.max_length_cm,
        (None, Some(target_mhz)) => {
            let limit = target_mhz * 1e6;
            if bandwidth_at(goal.max_length_cm)? > limit {
                return Err(DesignError::BandwidthUnreachable {
                    target_mhz,
                    max_length_cm: goal.max_length_cm,
                });
            }
            let excess = |l: f64| bandwidth_at(l).map(|b| b - limit).unwrap_or(f64::INFINITY);
            let lo = goal.max_length_cm * 1e-6;
            if excess(lo) <= 0.0 {
                lo
            } else {
                // bracket [lo, max] has the sign change; keep the feasible end
                let root = bisect(excess, lo, goal.max_length_cm, 1e-9 * goal.max_length_cm)
                    .unwrap_or(goal.max_length_cm);
                let root = root + 1e-9 * goal.max_length_cm;
                root.min(goal.max_length_cm)
            }
        }
    };
    let cavity = cavity_at(length_cm)?;
    let finesse = cavity.finesse()?;

    let poling_nominal = solve_poling_period(&fields, pump, target, t_nominal)?;
    let spec = SourceSpec {
        material: goal.material.clone(),
        interaction: goal.interaction,
        axes: goal.axes,
        pump_wavelength_nm: pump,
        poling_period_um: poling_nominal,
        temperature_c: t_nominal,
        cavity,
        corrections: goal.corrections.clone(),
        include_phasematch: false,
    };
    let source = Source::from_parts(spec, fields.clone())?;
    let tuned = tune_temperature(
        &source,
        target,
        (t_nominal - half, t_nominal + half),
        Objective::CentralClusterPresent,
    )?;
    let temperature_c = tuned.temperature_c;
    let poling_period_um = solve_poling_period(&fields, pump, target, temperature_c)?;
    let source = source
        .with_temperature(temperature_c)?
        .with_poling_period(poling_period_um)?
        .with_phasematch(true);

    let lobe = main_lobe(&source, target)?;
    let clusters = verify_single_mode(&source, lobe)?;

    let f_single = min_single_mode_finesse(&fields, target, pump, temperature_c)?;
    let required = goal.finesse_safety_factor * f_single;
    if finesse < required * (1.0 - 1e-9) {
        return Err(DesignError::FinesseBelowTarget { finesse, required });
    }
    let (n_s, n_i) = fields.group_indices(pump, target, temperature_c)?;
    let figures = source.mode_figures(target)?;
    if let Some(target_mhz) = goal.max_mode_bandwidth_mhz {
        if figures.mode_bandwidth_hz > target_mhz * 1e6 * (1.0 + 1e-9) {
            return Err(DesignError::BandwidthUnreachable {
                target_mhz,
                max_length_cm: goal.max_length_cm,
            });
        }
    }
    let jitter_s = goal.detector_jitter_ps * 1e-12;
    Ok(DesignResult {
        length_cm,
        r1: cavity.r1(),
        r2: cavity.r2(),
        alpha_db_cm: cavity.loss_db_per_cm(),
        poling_period_um,
        temperature_c,
        finesse,
        m_min_finesse: f_single,
        mode_count: mode_count(finesse, n_s, n_i)?,
        mode_bandwidth_mhz: figures.mode_bandwidth_hz * 1e-6,
        mode_bandwidth_pm: target * target * 1e-9 * figures.mode_bandwidth_hz / SPEED_OF_LIGHT
            * 1e3,
        coherence_time_ns: figures.coherence_time_s * 1e9,
        p_out: cavity.pair_emission_probability()?,
        cluster_spacing_nm: cluster_spacing_nm(&fields, target, pump, temperature_c, length_cm)?,
        resolvable: resolvability_check(figures.mode_bandwidth_hz, jitter_s),
        main_lobe_nm: lobe,
        clusters: cluster_report(&clusters),
    })
}

/// Computes the spectrum over `window_nm` and rejects any multi-mode cluster.
pub fn verify_single_mode(source: &Source, window_nm: (f64, f64)) -> Result<Vec<Cluster>> {
    let spectrum = spectrum::compute_spectrum(source, window_nm, SamplingPolicy::default())?;
    let modes = spectrum::detect_modes(&spectrum, VERIFICATION_THRESHOLD)?;
    let clusters = spectrum::group_clusters(&modes, source)?;
    if let Some(bad) = clusters.iter().find(|c| c.modes.len() > 1) {
        return Err(DesignError::DesignInfeasible {
            cluster: bad.clone(),
        });
    }
    Ok(clusters)
}

/// `F_{M=1}` over an evenly spaced signal range; degenerate points are gaps.
pub fn finesse_curve(
    fields: &FieldModels,
    pump_nm: f64,
    signal_range_nm: (f64, f64),
    temperature_c: f64,
    n_points: usize,
) -> Result<Vec<(f64, Option<f64>)>> {
    let (lo, hi) = signal_range_nm;
    if n_points < 2 || !(hi > lo) {
        return Err(DesignError::InvalidArgument {
            field: "n_points",
            value: n_points as f64,
            constraint: ">= 2 over a nonempty range",
        });
    }
    (0..n_points)
        .into_par_iter()
        .map(|j| {
            let nm = lo + (hi - lo) * j as f64 / (n_points - 1) as f64;
            match min_single_mode_finesse(fields, nm, pump_nm, temperature_c) {
                Ok(f) => Ok((nm, Some(f))),
                Err(DesignError::DegenerateDispersion { .. }) => Ok((nm, None)),
                Err(e) => Err(e),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_count_inverts_single_mode_finesse() {
        let (n_s, n_i) = (2.26, 2.18);
        let f = (n_s + n_i) / (2.0 * (n_s - n_i));
        assert!((mode_count(f, n_s, n_i).unwrap() - 1.0).abs() < 1e-12);
        let m1 = mode_count(10.0, n_s, n_i).unwrap();
        let m2 = mode_count(20.0, n_s, n_i).unwrap();
        assert!((m1 / m2 - 2.0).abs() < 1e-12);
        assert_eq!(mode_count(10.0, n_i, n_s).unwrap(), m1);
        assert!(matches!(
            mode_count(10.0, 2.2, 2.2),
            Err(DesignError::DegenerateDispersion { .. })
        ));
        assert!(mode_count(0.0, n_s, n_i).is_err());
    }

    #[test]
    fn resolvability_boundaries() {
        let tau = 543e-12;
        let bandwidth = 1.0 / (PI * tau);
        assert!(resolvability_check(bandwidth, 100e-12));
        assert!(resolvability_check(bandwidth, 0.0));
        let exact = cavity::coherence_time(bandwidth);
        assert!(!resolvability_check(bandwidth, exact));
    }

    #[test]
    fn output_coupler_hits_target() {
        let base = CavitySpec::new(0.1, 1.0, 0.5, 0.06).unwrap();
        let r2 = solve_output_coupler(&base, 116.2268149787594).unwrap();
        assert!((r2 - 0.95).abs() < 1e-8);
        assert!(base.with_r2(r2).unwrap().finesse().unwrap() >= 116.2268149787594);
        assert!(matches!(
            solve_output_coupler(&base, 1e5),
            Err(DesignError::CoatingInfeasible { .. })
        ));
    }

    #[test]
    fn goal_validation_names_the_field() {
        let goal: DesignGoal = serde_json::from_str(
            r#"{"material":"PPLN","interaction":"type2","pump_wavelength_nm":780,
                "target_signal_nm":1560,"max_length_cm":0.1,"alpha_db_cm":0.06,
                "r1":1.2,"nominal_temperature_c":80}"#,
        )
        .unwrap();
        let err = goal.validate().unwrap_err().to_string();
        assert!(err.contains("r1"), "{err}");
    }
}
