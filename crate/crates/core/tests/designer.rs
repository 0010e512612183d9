use spdc_design::designer::{
    self, central_peak, design_cavity, solve_output_coupler, tune_temperature, DesignError,
    Objective, VERIFICATION_THRESHOLD,
};
use spdc_design::spectrum::{compute_spectrum, detect_modes, group_clusters};
use spdc_design::{CavitySpec, DesignGoal, DesignResult, MaterialCatalog, SamplingPolicy, Source};

fn telecom_goal() -> DesignGoal {
    serde_json::from_str(
        r#"{"material":"PPLN","interaction":"type2","pump_wavelength_nm":780,
            "target_signal_nm":1560,"max_length_cm":0.1,"alpha_db_cm":0.06,
            "nominal_temperature_c":80.14,"pinned_length_cm":0.1,"pinned_r2":0.95}"#,
    )
    .unwrap()
}

fn design(goal: &DesignGoal) -> DesignResult {
    design_cavity(&MaterialCatalog::builtin(), goal).unwrap()
}

/// Recomputes the verification spectrum from the returned parameters alone.
fn assert_invariants(goal: &DesignGoal, result: &DesignResult) {
    assert!(result.finesse >= goal.finesse_safety_factor * result.m_min_finesse * (1.0 - 1e-9));
    let source = Source::new(
        &MaterialCatalog::builtin(),
        goal.source_spec(result).unwrap(),
    )
    .unwrap();
    let spectrum =
        compute_spectrum(&source, result.main_lobe_nm, SamplingPolicy::default()).unwrap();
    let modes = detect_modes(&spectrum, VERIFICATION_THRESHOLD).unwrap();
    let clusters = group_clusters(&modes, &source).unwrap();
    assert!(!clusters.is_empty());
    for cluster in &clusters {
        assert_eq!(
            cluster.modes.len(),
            1,
            "cluster at {} nm",
            cluster.center_nm
        );
    }
    assert_eq!(clusters.len(), result.clusters.len());
}

#[test]
fn worked_example_figures() {
    let goal = telecom_goal();
    let result = design(&goal);
    assert!((result.finesse - 116.2).abs() < 0.5, "{}", result.finesse);
    assert!((result.p_out - 0.95).abs() < 0.005, "{}", result.p_out);
    assert!(
        (result.temperature_c - 80.14).abs() < 5.0,
        "{}",
        result.temperature_c
    );
    assert!(
        (result.mode_bandwidth_pm - 4.6).abs() < 0.2 * 4.6,
        "{}",
        result.mode_bandwidth_pm
    );
    assert!(
        (result.cluster_spacing_nm - 15.36).abs() < 0.1,
        "{}",
        result.cluster_spacing_nm
    );
    assert!(result.main_lobe_nm.0 < 1560.0 && result.main_lobe_nm.1 > 1560.0);
    assert!(result.resolvable);
    assert_invariants(&goal, &result);
}

#[test]
fn tuned_temperature_puts_the_strongest_peak_at_the_target() {
    let goal = telecom_goal();
    let result = design(&goal);
    let source = Source::new(
        &MaterialCatalog::builtin(),
        goal.source_spec(&result).unwrap(),
    )
    .unwrap()
    .with_phasematch(false);
    let peak = central_peak(&source, 1560.0).unwrap();
    assert!(peak >= 0.5, "{peak}");
    // a one-point window whose only temperature meets the objective returns it
    let t = result.temperature_c;
    let outcome =
        tune_temperature(&source, 1560.0, (t, t), Objective::CentralClusterPresent).unwrap();
    assert_eq!(outcome.temperature_c, t);
    assert_eq!(outcome.central_peak, peak);
}

#[test]
fn result_json_round_trips() {
    let result = design(&telecom_goal());
    let json = serde_json::to_string(&result).unwrap();
    for field in [
        "length_cm",
        "poling_period_um",
        "temperature_c",
        "mode_bandwidth_mhz",
        "mode_bandwidth_pm",
        "cluster_spacing_nm",
        "p_out",
        "finesse",
        "m_min_finesse",
        "resolvable",
    ] {
        assert!(json.contains(&format!("\"{field}\"")), "{field}");
    }
    let back: DesignResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back, result);
}

#[test]
fn detector_jitter_sets_resolvability() {
    let mut goal = telecom_goal();
    goal.detector_jitter_ps = 0.0;
    assert!(design(&goal).resolvable);
    goal.detector_jitter_ps = 1000.0;
    assert!(!design(&goal).resolvable);
}

#[test]
fn higher_safety_factor_needs_a_better_output_coupler() {
    let base = CavitySpec::new(0.1, 1.0, 0.5, 0.06).unwrap();
    let f1 = 28.03;
    let low = solve_output_coupler(&base, 1.2 * f1).unwrap();
    let high = solve_output_coupler(&base, 5.0 * f1).unwrap();
    assert!(high > low);

    let mut goal = telecom_goal();
    goal.pinned_r2 = None;
    goal.finesse_safety_factor = 2.0;
    let modest = design(&goal);
    goal.finesse_safety_factor = 5.0;
    let strict = design(&goal);
    assert!(strict.r2 > modest.r2);
    assert_invariants(&goal, &strict);
}

#[test]
fn default_safety_factor_is_rejected_by_verification() {
    // F = 1.2 F_{M=1} leaves a neighbouring mode above the detection threshold
    let mut goal = telecom_goal();
    goal.pinned_r2 = None;
    match design_cavity(&MaterialCatalog::builtin(), &goal) {
        Err(DesignError::DesignInfeasible { cluster }) => assert!(cluster.modes.len() > 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn more_loss_never_raises_emission_probability() {
    let mut goal = telecom_goal();
    let mut last = f64::INFINITY;
    for alpha in [0.0, 0.02, 0.06, 0.2, 0.5] {
        goal.alpha_db_cm = alpha;
        let p = design(&goal).p_out;
        assert!(p <= last, "alpha {alpha}: {p} > {last}");
        last = p;
    }
}

#[test]
fn bandwidth_target_picks_the_shortest_length() {
    let mut goal = telecom_goal();
    goal.pinned_length_cm = None;
    goal.pinned_r2 = None;
    goal.finesse_safety_factor = 3.0;
    goal.max_length_cm = 0.5;
    goal.max_mode_bandwidth_mhz = Some(400.0);
    let result = design(&goal);
    assert!(
        result.mode_bandwidth_mhz <= 400.0 + 1e-6,
        "{} at L = {} T = {}",
        result.mode_bandwidth_mhz,
        result.length_cm,
        result.temperature_c
    );
    assert!(
        result.mode_bandwidth_mhz > 395.0,
        "{}",
        result.mode_bandwidth_mhz
    );
    assert!(result.length_cm < goal.max_length_cm);
    assert_invariants(&goal, &result);

    goal.max_mode_bandwidth_mhz = Some(1.0);
    assert!(matches!(
        design_cavity(&MaterialCatalog::builtin(), &goal),
        Err(DesignError::BandwidthUnreachable { .. })
    ));
}

#[test]
fn invalid_reflectivity_names_the_bound() {
    let mut goal = telecom_goal();
    goal.r1 = 1.2;
    let err = design_cavity(&MaterialCatalog::builtin(), &goal).unwrap_err();
    assert!(matches!(
        err,
        DesignError::InvalidArgument { field: "r1", .. }
    ));
    assert!(err.to_string().contains("R1 <= 1"), "{err}");
}

#[test]
fn unreachable_objective_reports_best_candidate() {
    let goal = telecom_goal();
    let result = design(&goal);
    let source = Source::new(
        &MaterialCatalog::builtin(),
        goal.source_spec(&result).unwrap(),
    )
    .unwrap()
    .with_phasematch(false);
    let t = result.temperature_c;
    // a lone temperature cannot be "absent" relative to itself unless it is dark
    match tune_temperature(&source, 1560.0, (t, t), Objective::CentralClusterAbsent) {
        Err(DesignError::ObjectiveNotFound {
            best_temperature_c, ..
        }) => assert_eq!(best_temperature_c, t),
        other => panic!("{other:?}"),
    }
}

#[test]
fn single_mode_finesse_of_identical_axes_at_degeneracy_is_an_error() {
    let fields = spdc_design::FieldModels::resolve(
        &MaterialCatalog::builtin(),
        "PPLN",
        spdc_design::Interaction::Type0.field_axes(),
        &Default::default(),
    )
    .unwrap();
    assert!(matches!(
        designer::min_single_mode_finesse(&fields, 1560.0, 780.0, 100.0),
        Err(DesignError::DegenerateDispersion { .. })
    ));
}
