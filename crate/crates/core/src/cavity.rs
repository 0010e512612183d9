//! Fabry-Perot physics of the coated waveguide.
//!
//! Lengths are in centimeters, propagation loss in dB/cm, frequencies in
//! hertz and times in seconds.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::bisect;
use crate::SPEED_OF_LIGHT;

/// Smallest round-trip factor for which the Airy line still dips below half
/// its peak, i.e. for which a FWHM (and so a finesse) exists.
pub const MIN_FINESSE_RHO: f64 = 0.029_437_251_522_859_4; // (√2 − 1)^4

/// Upper end of the loss bracket used when inverting a measured finesse.
pub const MAX_LOSS_DB_PER_CM: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CavityError {
    #[error("invalid cavity: {field} = {value} violates {constraint}")]
    InvalidSpec {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("degenerate cavity: round-trip factor is {rho}, no light survives a round trip")]
    DegenerateCavity { rho: f64 },
    #[error("lossless cavity with perfect mirrors has infinite finesse")]
    InfiniteFinesse,
    #[error("round-trip factor {rho} is below {MIN_FINESSE_RHO}: the Airy line never falls to half maximum, finesse undefined")]
    NoHalfMaximum { rho: f64 },
    #[error("R1*R2 = 1 makes the Airy coefficient singular")]
    SingularAiry,
    #[error("{what}: target {target} is not reachable in [{lo}, {hi}]")]
    NotBracketed {
        what: &'static str,
        target: f64,
        lo: f64,
        hi: f64,
    },
}

pub type Result<T, E = CavityError> = std::result::Result<T, E>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCavity {
    length_cm: f64,
    r1: f64,
    r2: f64,
    alpha_db_cm: f64,
}

/// Mirror reflectivities, length and propagation loss of the resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCavity")]
pub struct CavitySpec {
    length_cm: f64,
    r1: f64,
    r2: f64,
    #[serde(rename = "alpha_db_cm")]
    loss_db_per_cm: f64,
}

impl TryFrom<RawCavity> for CavitySpec {
    type Error = CavityError;

    fn try_from(raw: RawCavity) -> Result<Self> {
        CavitySpec::new(raw.length_cm, raw.r1, raw.r2, raw.alpha_db_cm)
    }
}

impl CavitySpec {
    pub fn new(length_cm: f64, r1: f64, r2: f64, loss_db_per_cm: f64) -> Result<Self> {
        if !(length_cm > 0.0 && length_cm.is_finite()) {
            return Err(CavityError::InvalidSpec {
                field: "length_cm",
                value: length_cm,
                constraint: "0 < L",
            });
        }
        for (field, value) in [("r1", r1), ("r2", r2)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(CavityError::InvalidSpec {
                    field,
                    value,
                    constraint: "0 <= R <= 1",
                });
            }
        }
        if !(loss_db_per_cm >= 0.0 && loss_db_per_cm.is_finite()) {
            return Err(CavityError::InvalidSpec {
                field: "alpha_db_cm",
                value: loss_db_per_cm,
                constraint: "alpha >= 0",
            });
        }
        Ok(Self {
            length_cm,
            r1,
            r2,
            loss_db_per_cm,
        })
    }

    pub fn length_cm(&self) -> f64 {
        self.length_cm
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn loss_db_per_cm(&self) -> f64 {
        self.loss_db_per_cm
    }

    pub fn with_length(&self, length_cm: f64) -> Result<Self> {
        Self::new(length_cm, self.r1, self.r2, self.loss_db_per_cm)
    }

    pub fn with_r2(&self, r2: f64) -> Result<Self> {
        Self::new(self.length_cm, self.r1, r2, self.loss_db_per_cm)
    }

    pub fn with_loss(&self, loss_db_per_cm: f64) -> Result<Self> {
        Self::new(self.length_cm, self.r1, self.r2, loss_db_per_cm)
    }

    /// Power fraction surviving one round trip: `R1 R2 10^(−2αL/10)`.
    pub fn round_trip_factor(&self) -> f64 {
        // optical path per round trip is 2L
        self.r1 * self.r2 * 10f64.powf(-2.0 * self.loss_db_per_cm * self.length_cm / 10.0)
    }

    pub fn finesse(&self) -> Result<f64> {
        finesse_from_round_trip(self.round_trip_factor())
    }

    /// Coefficient `4√ρ/(1−√ρ)²` of the Airy line.
    pub fn airy_coefficient(&self) -> Result<f64> {
        let rho = self.round_trip_factor();
        if rho >= 1.0 {
            return Err(CavityError::SingularAiry);
        }
        let r = rho.sqrt();
        Ok(4.0 * r / ((1.0 - r) * (1.0 - r)))
    }

    /// Airy transmission `[1 + K sin²φ]⁻¹`, equal to 1 on resonance.
    ///
    /// The coefficient uses the full round-trip amplitude, mirrors and
    /// propagation loss together, so the line width matches [`CavitySpec::finesse`].
    /// With α = 0 this is the textbook `4√(R1R2)/(1−√(R1R2))²` form.
    pub fn airy_transmission(&self, phase: f64) -> Result<f64> {
        Ok(airy_line(self.airy_coefficient()?, phase))
    }

    /// Brute-force round-trip sum `|Σₙ₌₀ᴺ (r e^{2iφ})ⁿ|² (1 − r)²`, `r = √ρ`.
    ///
    /// Converges to [`CavitySpec::airy_transmission`] as N grows.
    pub fn airy_partial_sum(&self, phase: f64, n_roundtrips: usize) -> f64 {
        let r = self.round_trip_factor().sqrt();
        let step = Complex64::from_polar(r, 2.0 * phase);
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for _ in 0..=n_roundtrips {
            sum += term;
            term *= step;
        }
        sum.norm_sqr() * (1.0 - r) * (1.0 - r)
    }

    /// Probability that a pair born at the waveguide centre leaves through the output mirror.
    pub fn pair_emission_probability(&self) -> Result<f64> {
        let single_pass = 10f64.powf(-(self.loss_db_per_cm / 2.0) * self.length_cm / 10.0);
        let denominator = 1.0 - self.round_trip_factor();
        if denominator <= 0.0 {
            return Err(CavityError::DegenerateCavity {
                rho: self.round_trip_factor(),
            });
        }
        Ok(single_pass * (1.0 - self.r2) / denominator)
    }
}

pub fn round_trip_factor(spec: &CavitySpec) -> f64 {
    spec.round_trip_factor()
}

/// Finesse `π / (2 arcsin((1 − √ρ) / (2 ρ^¼)))`: free spectral range divided by the FWHM of the Airy line.
pub fn finesse_from_round_trip(rho: f64) -> Result<f64> {
    if rho <= 0.0 {
        return Err(CavityError::DegenerateCavity { rho });
    }
    if rho >= 1.0 {
        return Err(CavityError::InfiniteFinesse);
    }
    if rho < MIN_FINESSE_RHO {
        return Err(CavityError::NoHalfMaximum { rho });
    }
    let x = (1.0 - rho.sqrt()) / (2.0 * rho.powf(0.25));
    Ok(PI / (2.0 * x.min(1.0).asin()))
}

pub fn finesse(spec: &CavitySpec) -> Result<f64> {
    spec.finesse()
}

#[inline]
pub fn airy_line(coefficient: f64, phase: f64) -> f64 {
    let s = phase.sin();
    1.0 / (1.0 + coefficient * s * s)
}

pub fn airy_transmission(spec: &CavitySpec, phase: f64) -> Result<f64> {
    spec.airy_transmission(phase)
}

pub fn airy_partial_sum(spec: &CavitySpec, phase: f64, n_roundtrips: usize) -> f64 {
    spec.airy_partial_sum(phase, n_roundtrips)
}

/// Single-pass phase `2π L n/λ`.
#[inline]
pub fn resonance_phase(wavelength_um: f64, n_eff: f64, length_cm: f64) -> f64 {
    2.0 * PI * length_cm * 1e4 * n_eff / wavelength_um
}

/// `c / (2 N L)`.
pub fn free_spectral_range(length_cm: f64, group_index: f64) -> f64 {
    SPEED_OF_LIGHT / (2.0 * group_index * length_cm * 1e-2)
}

/// Mean of the signal and idler line widths, `(FSR_s + FSR_i) / (2F)`.
pub fn mode_bandwidth(fsr_signal: f64, fsr_idler: f64, finesse: f64) -> f64 {
    (fsr_signal + fsr_idler) / (2.0 * finesse)
}

pub fn coherence_time(bandwidth_hz: f64) -> f64 {
    1.0 / (PI * bandwidth_hz)
}

pub fn pair_emission_probability(spec: &CavitySpec) -> Result<f64> {
    spec.pair_emission_probability()
}

/// Propagation loss that reproduces a measured finesse for known mirrors.
///
/// Bisection over α ∈ [0, 10] dB/cm to 1e-6 relative.
pub fn loss_from_finesse(measured_finesse: f64, r1: f64, r2: f64, length_cm: f64) -> Result<f64> {
    let spec = CavitySpec::new(length_cm, r1, r2, 0.0)?;
    let excess = |alpha: f64| {
        let f = match spec.with_loss(alpha).map(|s| s.finesse()) {
            Ok(Ok(f)) => f,
            Ok(Err(CavityError::InfiniteFinesse)) => f64::INFINITY,
            _ => 0.0,
        };
        f - measured_finesse
    };
    // finesse falls monotonically with loss; 1e-13 absolute is well inside 1e-6 relative
    bisect(excess, 0.0, MAX_LOSS_DB_PER_CM, 1e-13).ok_or(CavityError::NotBracketed {
        what: "loss inversion",
        target: measured_finesse,
        lo: 0.0,
        hi: MAX_LOSS_DB_PER_CM,
    })
}

/// Free spectral ranges, finesse and the derived line width and coherence time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeFigures {
    pub fsr_signal_hz: f64,
    pub fsr_idler_hz: f64,
    pub finesse: f64,
    pub mode_bandwidth_hz: f64,
    pub coherence_time_s: f64,
}

impl ModeFigures {
    pub fn new(fsr_signal_hz: f64, fsr_idler_hz: f64, finesse: f64) -> Self {
        let mode_bandwidth_hz = mode_bandwidth(fsr_signal_hz, fsr_idler_hz, finesse);
        Self {
            fsr_signal_hz,
            fsr_idler_hz,
            finesse,
            mode_bandwidth_hz,
            coherence_time_s: coherence_time(mode_bandwidth_hz),
        }
    }
}
