//! Fixtures shared by the benchmarks.

use spdc_design::{CavitySpec, DesignGoal, Interaction, MaterialCatalog, Source, SourceSpec};

/// Type II PPLN, 1 mm, R1 = 1, R2 = 0.95, at the standard operating point.
pub fn telecom_source() -> Source {
    let spec = SourceSpec {
        material: "PPLN".into(),
        interaction: Interaction::TypeII,
        axes: None,
        pump_wavelength_nm: 780.0,
        poling_period_um: 147.89,
        temperature_c: 80.14,
        cavity: CavitySpec::new(0.1, 1.0, 0.95, 0.06).expect("valid cavity"),
        corrections: Default::default(),
        include_phasematch: true,
    };
    Source::new(&MaterialCatalog::builtin(), spec).expect("built-in catalog covers PPLN")
}

/// The same device as a design goal with length and output coupler pinned.
pub fn telecom_goal() -> DesignGoal {
    DesignGoal {
        material: "PPLN".into(),
        interaction: Interaction::TypeII,
        axes: None,
        pump_wavelength_nm: 780.0,
        target_signal_nm: 1560.0,
        max_length_cm: 0.1,
        alpha_db_cm: 0.06,
        r1: 1.0,
        detector_jitter_ps: 0.0,
        finesse_safety_factor: 1.2,
        nominal_temperature_c: 80.14,
        temperature_half_width_c: 8.0,
        max_mode_bandwidth_mhz: None,
        pinned_length_cm: Some(0.1),
        pinned_r2: Some(0.95),
        corrections: Default::default(),
    }
}
