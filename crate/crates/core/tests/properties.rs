use std::f64::consts::PI;

use proptest::prelude::*;
use spdc_design::cavity::{self, CavitySpec};
use spdc_design::designer::{self, solve_output_coupler};
use spdc_design::spectrum::{
    self, compute_spectrum, convolve_resolution, detect_modes, group_clusters,
};
use spdc_design::{
    Axis, DispersionModel, FieldModels, Interaction, MaterialCatalog, SamplingPolicy, Source,
    SourceSpec, SPEED_OF_LIGHT,
};

fn dense(points_per_fwhm: f64) -> SamplingPolicy {
    SamplingPolicy {
        points_per_fwhm,
        ..Default::default()
    }
}

fn ppln(
    interaction: Interaction,
    temperature_c: f64,
    poling_period_um: f64,
    cavity: CavitySpec,
) -> Source {
    let spec = SourceSpec {
        material: "PPLN".into(),
        interaction,
        axes: None,
        pump_wavelength_nm: 780.0,
        poling_period_um,
        temperature_c,
        cavity,
        corrections: Default::default(),
        include_phasematch: true,
    };
    Source::new(&MaterialCatalog::builtin(), spec).unwrap()
}

fn telecom() -> Source {
    ppln(
        Interaction::TypeII,
        80.14,
        147.89,
        CavitySpec::new(0.1, 1.0, 0.95, 0.06).unwrap(),
    )
}

/// Constant, equal signal and idler indices with the pump phase a multiple of π,
/// so every signal resonance is also an idler resonance.
fn degenerate_comb() -> Source {
    let mut catalog = MaterialCatalog::default();
    catalog.insert(DispersionModel::constant("FLAT", Axis::Extraordinary, 2.0));
    let pump_nm = 775.0;
    let length_cm = 20_000.0 * pump_nm / 4e7;
    let spec = SourceSpec {
        material: "FLAT".into(),
        interaction: Interaction::Type0,
        axes: None,
        pump_wavelength_nm: pump_nm,
        poling_period_um: 10.0,
        temperature_c: 25.0,
        cavity: CavitySpec::new(length_cm, 0.9, 0.9, 0.0).unwrap(),
        corrections: Default::default(),
        include_phasematch: false,
    };
    Source::new(&catalog, spec).unwrap()
}

fn cavity_strategy() -> impl Strategy<Value = CavitySpec> {
    (0.05f64..4.0, 0.3f64..0.99, 0.3f64..0.99, 0.0f64..0.5)
        .prop_map(|(l, r1, r2, a)| CavitySpec::new(l, r1, r2, a).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn airy_closed_form_matches_round_trip_sum(spec in cavity_strategy(), phase in 0.0f64..(2.0 * PI)) {
        let closed = spec.airy_transmission(phase).unwrap();
        let summed = spec.airy_partial_sum(phase, 2000);
        prop_assert!((closed - summed).abs() < 1e-5, "{closed} vs {summed}");
    }

    #[test]
    fn airy_is_pi_periodic_and_bounded(spec in cavity_strategy(), phase in -10.0f64..10.0) {
        let a = spec.airy_transmission(phase).unwrap();
        let b = spec.airy_transmission(phase + PI).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert!(a > 0.0 && a <= 1.0);
    }

    #[test]
    fn emission_probability_is_a_probability_and_falls_with_length(spec in cavity_strategy()) {
        let p = spec.pair_emission_probability().unwrap();
        prop_assert!(p > 0.0 && p <= 1.0);
        if spec.loss_db_per_cm() > 1e-6 {
            let longer = spec.with_length(spec.length_cm() * 1.5).unwrap();
            prop_assert!(longer.pair_emission_probability().unwrap() < p);
        }
    }

    #[test]
    fn mode_bandwidth_is_symmetric(f1 in 1e8f64..1e11, f2 in 1e8f64..1e11, finesse in 1.0f64..1000.0) {
        let b = cavity::mode_bandwidth(f1, f2, finesse);
        prop_assert_eq!(b, cavity::mode_bandwidth(f2, f1, finesse));
        let figures = spdc_design::ModeFigures::new(f1, f2, finesse);
        prop_assert_eq!(figures.mode_bandwidth_hz, (f1 + f2) / (2.0 * finesse));
        prop_assert_eq!(figures.coherence_time_s, 1.0 / (PI * figures.mode_bandwidth_hz));
    }

    #[test]
    fn energy_is_conserved_on_every_grid_point(lo in 1530.0f64..1590.0, width in 0.05f64..0.5) {
        let spec = compute_spectrum(&telecom(), (lo, lo + width), SamplingPolicy::default()).unwrap();
        let pump = 780.0;
        for i in 0..spec.len() {
            let s = spec.grid_nm[i];
            let idler = spec.idler_nm(i);
            let residual = (1.0 / s + 1.0 / idler - 1.0 / pump) * pump;
            prop_assert!(residual.abs() < 1e-12, "{residual}");
        }
    }

    #[test]
    fn spectrum_is_the_product_of_its_factors(lo in 1540.0f64..1580.0) {
        let source = telecom();
        let on = compute_spectrum(&source, (lo, lo + 0.2), SamplingPolicy::default()).unwrap();
        let off = compute_spectrum(&source.with_phasematch(false), (lo, lo + 0.2), SamplingPolicy::default()).unwrap();
        let components = on.components.as_ref().unwrap();
        for (i, c) in components.iter().enumerate() {
            let product = c.airy_s * c.airy_i * c.phasematch;
            let v = on.values[i];
            prop_assert!((v - product).abs() <= 1e-12 * product.abs());
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(off.values[i] >= v);
        }
    }

    #[test]
    fn phase_mismatch_is_linear_in_the_grating_term(signal in 1500.0f64..1620.0, delta in -1e-4f64..1e-4) {
        let source = telecom();
        let base = source.phase_mismatch(signal).unwrap();
        let inverse = 1.0 / 147.89 + delta;
        let shifted = source.with_poling_period(1.0 / inverse).unwrap().phase_mismatch(signal).unwrap();
        let expected = -2.0 * PI * delta * 1e6;
        prop_assert!((shifted - base - expected).abs() < 1e-6 * (1.0 + expected.abs()));
    }

    #[test]
    fn poling_period_solve_round_trips(
        pump in 700.0f64..1000.0,
        ratio in 1.5f64..2.5,
        t in 30.0f64..200.0,
        type_ii in any::<bool>(),
    ) {
        let interaction = if type_ii { Interaction::TypeII } else { Interaction::Type0 };
        let signal = pump * ratio;
        let fields = FieldModels::resolve(&MaterialCatalog::builtin(), "PPLN", interaction.field_axes(), &Default::default()).unwrap();
        match designer::solve_poling_period(&fields, pump, signal, t) {
            Ok(period) => {
                let mut spec = telecom().spec().clone();
                spec.interaction = interaction;
                spec.pump_wavelength_nm = pump;
                spec.temperature_c = t;
                spec.poling_period_um = period;
                let source = Source::from_parts(spec, fields).unwrap();
                let dk = source.phase_mismatch(signal).unwrap();
                let grating = 2.0 * PI / (period * 1e-6);
                prop_assert!(dk.abs() <= 1e-9 * grating, "{dk} rad/m against {grating}");
            }
            Err(designer::DesignError::NoFirstOrderQpm { mismatch_per_m }) => {
                prop_assert!(mismatch_per_m <= 0.0);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn detection_is_invariant_under_rescaling(lo in 1550.0f64..1565.0) {
        let source = telecom().with_phasematch(false);
        let spec = compute_spectrum(&source, (lo, lo + 3.0), SamplingPolicy::default()).unwrap();
        let mut scaled = spec.clone();
        scaled.values.iter_mut().for_each(|v| *v *= 0.37);
        let a = detect_modes(&spec, 0.1).unwrap();
        let b = detect_modes(&scaled, 0.1).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p.center_nm - q.center_nm).abs() < 1e-9);
            prop_assert!((p.fwhm_nm - q.fwhm_nm).abs() < 1e-9);
            prop_assert!((p.height * 0.37 - q.height).abs() < 1e-12);
        }
        let ca = group_clusters(&a, &source).unwrap();
        let cb = group_clusters(&b, &source).unwrap();
        prop_assert_eq!(ca.len(), cb.len());
        for (x, y) in ca.iter().zip(&cb) {
            prop_assert_eq!(x.modes.len(), y.modes.len());
            prop_assert!((x.center_nm - y.center_nm).abs() < 1e-9);
        }
    }

    #[test]
    fn convolution_preserves_the_integral(fwhm_pm in 20.0f64..2000.0) {
        let source = ppln(Interaction::Type0, 128.6, 16.6, CavitySpec::new(3.6, 0.85, 0.85, 0.06).unwrap())
            .with_phasematch(false);
        let spec = compute_spectrum(&source, (1555.0, 1565.0), SamplingPolicy::default()).unwrap();
        let out = convolve_resolution(&spec, fwhm_pm * 1e-3).unwrap();
        prop_assert_eq!(out.len(), spec.len());
        prop_assert!(out.components.is_none());
        let (a, b) = (spec.integral(), out.integral());
        prop_assert!(((a - b) / a).abs() < 1e-9, "{a} vs {b}");
        prop_assert!(out.values.iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn finesse_is_monotone_on_grids() {
    let base = CavitySpec::new(1.0, 0.9, 0.9, 0.1).unwrap();
    let mut last = 0.0;
    for k in 1..=40 {
        let f = base
            .with_r2(0.5 + 0.0124 * k as f64)
            .unwrap()
            .finesse()
            .unwrap();
        assert!(f > last);
        last = f;
    }
    let mut last = f64::INFINITY;
    for k in 0..40 {
        let f = base.with_loss(0.025 * k as f64).unwrap().finesse().unwrap();
        assert!(f < last);
        last = f;
    }
    let mut last = f64::INFINITY;
    for k in 1..=40 {
        let f = base.with_length(0.1 * k as f64).unwrap().finesse().unwrap();
        assert!(f < last);
        last = f;
    }
}

#[test]
fn finesse_matches_measured_airy_width() {
    for &(r1, alpha, length) in &[(1.0, 0.0, 0.1), (0.9, 0.06, 3.6), (0.99, 0.3, 1.0)] {
        let base = CavitySpec::new(length, r1, 0.5, alpha).unwrap();
        for target in [10.0, 20.0, 50.0, 116.2, 250.0, 500.0] {
            let Ok(r2) = solve_output_coupler(&base, target) else {
                continue;
            };
            let spec = base.with_r2(r2).unwrap();
            let half_phase = spdc_design::numeric::bisect(
                |phi| spec.airy_transmission(phi).unwrap() - 0.5,
                0.0,
                PI / 2.0,
                1e-15,
            )
            .unwrap();
            // FSR is π in round-trip phase; the FWHM spans 2·half_phase
            let measured = PI / (2.0 * half_phase);
            let closed = spec.finesse().unwrap();
            assert!(
                ((measured - closed) / closed).abs() < 0.01,
                "{measured} vs {closed}"
            );
        }
    }
}

#[test]
fn compute_spectrum_matches_pointwise_evaluation() {
    let source = telecom();
    let spec = compute_spectrum(&source, (1559.0, 1559.6), SamplingPolicy::default()).unwrap();
    for (i, &nm) in spec.grid_nm.iter().enumerate() {
        let direct = spectrum::joint_spectral_intensity(&source, nm).unwrap();
        assert!((spec.values[i] - direct).abs() <= 1e-12 * direct.max(1e-300));
    }
    let cavity = *source.cavity();
    let fields = source.fields();
    for i in (0..spec.len()).step_by(97) {
        let c = spec.components.as_ref().unwrap()[i];
        let nm = spec.grid_nm[i];
        let n_s = fields.signal.refractive_index(nm * 1e-3, 80.14).unwrap();
        let n_i = fields
            .idler
            .refractive_index(c.lambda_i_nm * 1e-3, 80.14)
            .unwrap();
        let phi_s = cavity::resonance_phase(nm * 1e-3, n_s, 0.1);
        let phi_i = cavity::resonance_phase(c.lambda_i_nm * 1e-3, n_i, 0.1);
        assert!((cavity.airy_partial_sum(phi_s, 2000) - c.airy_s).abs() < 1e-5);
        assert!((cavity.airy_partial_sum(phi_i, 2000) - c.airy_i).abs() < 1e-5);
    }
}

#[test]
fn spectrum_is_deterministic() {
    let source = telecom();
    let a = compute_spectrum(&source, (1555.0, 1557.0), SamplingPolicy::default()).unwrap();
    let b = compute_spectrum(&source, (1555.0, 1557.0), SamplingPolicy::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn identical_dispersion_gives_one_unbroken_comb() {
    let source = degenerate_comb();
    let spec = compute_spectrum(&source, (1549.0, 1551.0), SamplingPolicy::default()).unwrap();
    let modes = detect_modes(&spec, 0.5).unwrap();
    let fsr = source.signal_fsr_nm(1550.0).unwrap();
    let expected = (2.0 / fsr).floor() as usize;
    assert!(
        modes.len() + 1 >= expected,
        "{} modes, {expected} FSRs",
        modes.len()
    );
    assert!(modes.iter().all(|m| m.height > 0.99));
    let clusters = group_clusters(&modes, &source).unwrap();
    assert_eq!(clusters.len(), 1);
    assert!(clusters[0].span_nm > 2.0 - 2.0 * fsr);
    let (n_s, n_i) = source.group_indices(1550.0).unwrap();
    assert!(matches!(
        designer::mode_count(10.0, n_s, n_i),
        Err(designer::DesignError::DegenerateDispersion { .. })
    ));
}

#[test]
fn isolated_resonance_is_found_within_one_grid_step() {
    let source = degenerate_comb();
    let length_nm = source.cavity().length_cm() * 1e7;
    // resonance order m at λ = 2 L n / m
    let m = (2.0 * length_nm * 2.0 / 1550.0).round();
    let resonance = 2.0 * length_nm * 2.0 / m;
    let fsr = source.signal_fsr_nm(resonance).unwrap();
    let spec = compute_spectrum(
        &source,
        (resonance - 0.4 * fsr, resonance + 0.3 * fsr),
        SamplingPolicy::default(),
    )
    .unwrap();
    let modes = detect_modes(&spec, 0.1).unwrap();
    assert_eq!(modes.len(), 1);
    let step = spec.grid_nm[1] - spec.grid_nm[0];
    assert!((modes[0].center_nm - resonance).abs() < step);
    assert!(modes[0].fwhm_nm > 0.0);
}

#[test]
fn narrow_kernel_leaves_the_spectrum_unchanged() {
    let source = telecom().with_phasematch(false);
    let spec = compute_spectrum(&source, (1559.0, 1560.0), dense(64.0)).unwrap();
    let center = spec.grid_nm[spec.len() / 2];
    let step_nm = center * center * 1e-9 * spec.provenance.frequency_step_hz / SPEED_OF_LIGHT;
    let out = convolve_resolution(&spec, 2.05 * step_nm).unwrap();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = spec
        .values
        .iter()
        .zip(&out.values)
        .map(|(a, b)| a - b)
        .collect();
    assert!(norm(&diff) / norm(&spec.values) < 0.01);
}

#[test]
fn poling_period_varies_monotonically_with_temperature() {
    let fields = FieldModels::resolve(
        &MaterialCatalog::builtin(),
        "PPLN",
        Interaction::Type0.field_axes(),
        &Default::default(),
    )
    .unwrap();
    let periods: Vec<f64> = (0..=50)
        .map(|k| designer::solve_poling_period(&fields, 780.0, 1560.0, 30.0 + k as f64).unwrap())
        .collect();
    assert!(periods.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn finesse_curve_is_ordered_and_deterministic() {
    let fields = FieldModels::resolve(
        &MaterialCatalog::builtin(),
        "PPLN",
        Interaction::Type0.field_axes(),
        &Default::default(),
    )
    .unwrap();
    let a = designer::finesse_curve(&fields, 780.0, (1100.0, 2000.0), 25.0, 901).unwrap();
    let b = designer::finesse_curve(&fields, 780.0, (1100.0, 2000.0), 25.0, 901).unwrap();
    assert_eq!(a, b);
    assert!(a.windows(2).all(|w| w[1].0 > w[0].0));
    // λs = 1560 nm lands exactly on the grid: identical axes, a gap rather than a number
    let at_degeneracy = a.iter().find(|(nm, _)| (nm - 1560.0).abs() < 1e-9).unwrap();
    assert_eq!(at_degeneracy.1, None);
}

#[test]
fn mode_count_times_finesse_is_the_single_mode_finesse() {
    let fields = FieldModels::resolve(
        &MaterialCatalog::builtin(),
        "PPLN",
        Interaction::TypeII.field_axes(),
        &Default::default(),
    )
    .unwrap();
    let f1 = designer::min_single_mode_finesse(&fields, 1560.0, 780.0, 80.14).unwrap();
    let (n_s, n_i) = fields.group_indices(780.0, 1560.0, 80.14).unwrap();
    for f in [5.0, 28.0, 116.2, 400.0] {
        let m = designer::mode_count(f, n_s, n_i).unwrap();
        assert!((m * f - f1).abs() < 1e-9 * f1);
    }
    assert!((designer::mode_count(f1, n_s, n_i).unwrap() - 1.0).abs() < 1e-12);
}
