use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use spdc_design::designer::{design_cavity, finesse_curve};
use spdc_design::spectrum::{compute_spectrum, convolve_resolution, detect_modes, group_clusters};
use spdc_design::{FieldModels, Interaction, MaterialCatalog, SamplingPolicy};
use spdc_design_bench::{telecom_goal, telecom_source};

fn spectrum(c: &mut Criterion) {
    let source = telecom_source();
    c.bench_function("joint_spectral_intensity", |b| {
        b.iter(|| source.joint_spectral_intensity(black_box(1560.0)).unwrap())
    });
    c.bench_function("compute_spectrum 1540-1580 nm", |b| {
        b.iter(|| {
            compute_spectrum(
                &source,
                black_box((1540.0, 1580.0)),
                SamplingPolicy::default(),
            )
            .unwrap()
        })
    });
    let sampled = compute_spectrum(&source, (1540.0, 1580.0), SamplingPolicy::default()).unwrap();
    c.bench_function("detect_modes + group_clusters", |b| {
        b.iter(|| {
            let modes = detect_modes(black_box(&sampled), 0.1).unwrap();
            group_clusters(&modes, &source).unwrap()
        })
    });
    c.bench_function("convolve_resolution 0.5 nm", |b| {
        b.iter(|| convolve_resolution(black_box(&sampled), 0.5).unwrap())
    });
}

fn designer(c: &mut Criterion) {
    let catalog = MaterialCatalog::builtin();
    let fields = FieldModels::resolve(
        &catalog,
        "PPLN",
        Interaction::Type0.field_axes(),
        &Default::default(),
    )
    .unwrap();
    c.bench_function("finesse_curve 901 points", |b| {
        b.iter(|| finesse_curve(&fields, 780.0, black_box((1100.0, 2000.0)), 25.0, 901).unwrap())
    });
    let goal = telecom_goal();
    let mut group = c.benchmark_group("design");
    group.sample_size(10);
    group.bench_function("design_cavity telecom", |b| {
        b.iter(|| design_cavity(&catalog, black_box(&goal)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, spectrum, designer);
criterion_main!(benches);
