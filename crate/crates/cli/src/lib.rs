//! Command-line front end for `spdc-design`.
//!
//! [`run`] parses arguments, loads an optional [`config::RunConfig`],
//! executes one command and writes its artifacts atomically. Exit codes:
//! 0 on success, 1 when the computation or file output fails, 2 when the
//! arguments, configuration or input values are invalid.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod config;
mod output;
pub mod plot;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use rayon::prelude::*;
use spdc_design::cavity::{self, CavityError, CavitySpec};
use spdc_design::designer::{self, design_cavity, DesignError};
use spdc_design::dispersion::{load_material_catalog, DispersionError};
use spdc_design::report::{cluster_report, write_spectrum_csv};
use spdc_design::spectrum::{
    compute_spectrum, convolve_resolution, detect_modes, group_clusters, SampledSpectrum,
};
use spdc_design::{
    CatalogSource, DesignGoal, EffectiveIndex, FieldModels, MaterialCatalog, ModeFigures,
    SamplingPolicy, Source, SourceSpec, SpectrumError,
};

use args::{Cli, Command, OutputArgs, SourceArgs, SweepKind};
use config::{
    CavityParams, CavityReport, CommandKind, DesignReport, DispersionParams, DispersionReport,
    ModeReport, Outputs, RunConfig, SpectrumParams, SpectrumReport, SweepParams, SweepPoint,
    SweepReport,
};
use output::Staged;
use plot::{Plot, Series};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, configuration or input values.
    Usage(String),
    /// The computation or output failed.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn cavity_error(e: CavityError) -> CliError {
    match e {
        CavityError::InvalidSpec { .. } => usage(e.to_string()),
        _ => CliError::Failure(e.to_string()),
    }
}

fn dispersion_error(e: DispersionError) -> CliError {
    match e {
        // outside a model's validity, or unreadable: the inputs were well formed
        DispersionError::Io { .. }
        | DispersionError::WavelengthOutOfRange { .. }
        | DispersionError::TemperatureOutOfRange { .. }
        | DispersionError::StencilOutOfRange { .. }
        | DispersionError::NonPhysicalIndex { .. } => CliError::Failure(e.to_string()),
        _ => usage(e.to_string()),
    }
}

fn spectrum_error(e: SpectrumError) -> CliError {
    match e {
        SpectrumError::Dispersion(d) => dispersion_error(d),
        SpectrumError::Cavity(c) => cavity_error(c),
        SpectrumError::NonPhysicalSignal { .. }
        | SpectrumError::InvalidSource { .. }
        | SpectrumError::InvalidWindow { .. }
        | SpectrumError::InvalidPolicy(_)
        | SpectrumError::InvalidThreshold(_)
        | SpectrumError::ResolutionTooFine { .. } => usage(e.to_string()),
        SpectrumError::BudgetExceeded { .. } => CliError::Failure(e.to_string()),
    }
}

fn design_error(e: DesignError) -> CliError {
    match e {
        DesignError::Spectrum(s) => spectrum_error(s),
        DesignError::Cavity(c) => cavity_error(c),
        DesignError::InvalidArgument { .. } => usage(e.to_string()),
        _ => CliError::Failure(e.to_string()),
    }
}

fn need<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| usage(format!("missing --{flag} (or pass --config <path>)")))
}

/// Parses `args` (program name first), executes the command and returns the
/// process exit code. `env_catalog` is the catalog path taken from the
/// environment; `--catalog` and the config's `catalog_path` take precedence.
pub fn run<I, T>(
    args: I,
    env_catalog: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(cli, env_catalog) {
        Ok(text) => {
            let _ = stdout.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// The `parameters` record of `config`, or one built from inline flags.
fn parameters<T: serde::de::DeserializeOwned>(
    config: Option<&RunConfig>,
    inline: impl FnOnce() -> Result<T>,
) -> Result<T> {
    match config {
        Some(c) => c.parameters().map_err(usage),
        None => inline(),
    }
}

fn execute(cli: Cli, env_catalog: Option<PathBuf>) -> Result<String> {
    let (kind, config_path, flags) = match &cli.command {
        Command::Dispersion(a) => (CommandKind::Dispersion, &a.config, &a.output),
        Command::Cavity(a) => (CommandKind::Cavity, &a.config, &a.output),
        Command::Spectrum(a) => (CommandKind::Spectrum, &a.config, &a.output),
        Command::Design(a) => (CommandKind::Design, &a.config, &a.output),
        Command::Sweep(a) => (CommandKind::Sweep, &a.config, &a.output),
    };
    let config = config_path
        .as_deref()
        .map(RunConfig::load)
        .transpose()
        .map_err(usage)?;
    if let Some(c) = &config {
        if c.command != kind {
            return Err(usage(format!(
                "config is for the {} command, not {}",
                c.command.name(),
                kind.name()
            )));
        }
    }
    let outputs = merge_outputs(config.as_ref().map(|c| &c.output), flags);
    let catalog_path = cli
        .catalog
        .clone()
        .or_else(|| config.as_ref().and_then(|c| c.catalog_path.clone()))
        .or(env_catalog);
    let catalog = match &catalog_path {
        Some(p) => load_material_catalog(CatalogSource::File(p)),
        None => load_material_catalog(CatalogSource::BuiltIn),
    }
    .map_err(dispersion_error)?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Failure(format!("thread pool: {e}")))?;

    let mut staged = Staged::default();
    let text = pool.install(|| {
        let c = config.as_ref();
        match &cli.command {
            Command::Dispersion(a) => {
                let p = parameters(c, || {
                    Ok(DispersionParams {
                        material: need(a.material.clone(), "material")?,
                        axis: need(a.axis, "axis")?,
                        wavelength_nm: need(a.wavelength_nm, "wavelength-nm")?,
                        temperature_c: need(a.temperature_c, "temperature-c")?,
                        correction: Default::default(),
                    })
                })?;
                dispersion(&catalog, p, &outputs, &mut staged)
            }
            Command::Cavity(a) => {
                let p = parameters(c, || {
                    Ok(CavityParams {
                        cavity: CavitySpec::new(
                            need(a.length_cm, "L-cm")?,
                            a.r1.unwrap_or(1.0),
                            need(a.r2, "r2")?,
                            a.alpha_db_cm.unwrap_or(0.0),
                        )
                        .map_err(cavity_error)?,
                        group_index_signal: a.group_index_signal,
                        group_index_idler: a.group_index_idler,
                    })
                })?;
                cavity_figures(p, &outputs, &mut staged)
            }
            Command::Spectrum(a) => {
                let p = parameters(c, || {
                    let defaults = SamplingPolicy::default();
                    Ok(SpectrumParams {
                        source: source_spec(&a.source)?,
                        window_nm: (need(a.from_nm, "from-nm")?, need(a.to_nm, "to-nm")?),
                        sampling: SamplingPolicy {
                            points_per_fwhm: a.points_per_fwhm.unwrap_or(defaults.points_per_fwhm),
                            max_points: a.max_points.unwrap_or(defaults.max_points),
                        },
                        threshold: a.threshold.unwrap_or(designer::VERIFICATION_THRESHOLD),
                        resolution_fwhm_nm: a.resolution_nm,
                    })
                })?;
                spectrum(&catalog, p, &outputs, &mut staged)
            }
            Command::Design(a) => {
                let goal = parameters(c, || {
                    Ok(DesignGoal {
                        material: need(a.material.clone(), "material")?,
                        interaction: need(a.interaction, "interaction")?,
                        axes: None,
                        pump_wavelength_nm: need(a.pump_nm, "pump-nm")?,
                        target_signal_nm: need(a.signal_nm, "signal-nm")?,
                        max_length_cm: need(a.max_length_cm, "max-length-cm")?,
                        alpha_db_cm: need(a.alpha_db_cm, "alpha-db-cm")?,
                        r1: a.r1.unwrap_or(1.0),
                        detector_jitter_ps: a.jitter_ps.unwrap_or(0.0),
                        finesse_safety_factor: a.safety_factor.unwrap_or(1.2),
                        nominal_temperature_c: need(a.temperature_c, "temperature-c")?,
                        temperature_half_width_c: a.half_width_c.unwrap_or(8.0),
                        max_mode_bandwidth_mhz: a.max_bandwidth_mhz,
                        pinned_length_cm: a.length_cm,
                        pinned_r2: a.r2,
                        corrections: Default::default(),
                    })
                })?;
                design(&catalog, goal, &outputs, &mut staged)
            }
            Command::Sweep(a) => {
                let p = parameters(c, || match need(a.kind, "kind")? {
                    SweepKind::Finesse => Ok(SweepParams::Finesse {
                        material: need(a.source.material.clone(), "material")?,
                        interaction: need(a.source.interaction, "interaction")?,
                        axes: None,
                        pump_wavelength_nm: need(a.source.pump_nm, "pump-nm")?,
                        signal_range_nm: (need(a.from_nm, "from-nm")?, need(a.to_nm, "to-nm")?),
                        points: need(a.points, "points")?,
                        temperature_c: need(a.source.temperature_c, "temperature-c")?,
                        corrections: Default::default(),
                    }),
                    SweepKind::Temperature => Ok(SweepParams::Temperature {
                        source: source_spec(&a.source)?,
                        signal_nm: need(a.signal_nm, "signal-nm")?,
                        temperature_range_c: (need(a.from_c, "from-c")?, need(a.to_c, "to-c")?),
                        points: need(a.points, "points")?,
                    }),
                })?;
                sweep(&catalog, p, &outputs, &mut staged)
            }
        }
    })?;
    let written: Vec<String> = staged.paths().map(|p| p.display().to_string()).collect();
    staged
        .commit()
        .map_err(|e| CliError::Failure(format!("cannot write output: {e}")))?;
    let mut text = text;
    for path in written {
        let _ = writeln!(text, "wrote {path}");
    }
    Ok(text)
}

fn merge_outputs(config: Option<&Outputs>, flags: &OutputArgs) -> Outputs {
    let base = config.cloned().unwrap_or_default();
    Outputs {
        csv: flags.csv.clone().or(base.csv),
        json: flags.json.clone().or(base.json),
        plot: flags.plot.clone().or(base.plot),
        plot_log_scale: flags.log_y || base.plot_log_scale,
    }
}

fn source_spec(a: &SourceArgs) -> Result<SourceSpec> {
    Ok(SourceSpec {
        material: need(a.material.clone(), "material")?,
        interaction: need(a.interaction, "interaction")?,
        axes: None,
        pump_wavelength_nm: need(a.pump_nm, "pump-nm")?,
        poling_period_um: need(a.poling_um, "poling-um")?,
        temperature_c: need(a.temperature_c, "temperature-c")?,
        cavity: CavitySpec::new(
            need(a.length_cm, "L-cm")?,
            a.r1.unwrap_or(1.0),
            need(a.r2, "r2")?,
            a.alpha_db_cm.unwrap_or(0.0),
        )
        .map_err(cavity_error)?,
        corrections: Default::default(),
        include_phasematch: !a.no_phasematch,
    })
}

fn reject(outputs: &Outputs, command: &str, csv: bool, plot: bool) -> Result<()> {
    if !csv && outputs.csv.is_some() {
        return Err(usage(format!("{command} writes no CSV")));
    }
    if !plot && outputs.plot.is_some() {
        return Err(usage(format!("{command} writes no plot")));
    }
    Ok(())
}

fn json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text.into_bytes()
}

fn stage_json<T: serde::Serialize>(outputs: &Outputs, staged: &mut Staged, value: &T) {
    if let Some(path) = &outputs.json {
        staged.add(path, json(value));
    }
}

fn stage_plot(
    outputs: &Outputs,
    staged: &mut Staged,
    make: impl FnOnce(bool) -> Plot,
) -> Result<()> {
    if let Some(path) = &outputs.plot {
        let svg = plot::render_svg(&make(outputs.plot_log_scale))
            .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?;
        staged.add(path, svg);
    }
    Ok(())
}

fn dispersion(
    catalog: &MaterialCatalog,
    p: DispersionParams,
    outputs: &Outputs,
    staged: &mut Staged,
) -> Result<String> {
    reject(outputs, "dispersion", false, false)?;
    let model = catalog.get(&p.material, p.axis).map_err(dispersion_error)?;
    let index = EffectiveIndex::new(model, &p.correction).map_err(dispersion_error)?;
    let um = p.wavelength_nm * 1e-3;
    let n = index
        .refractive_index(um, p.temperature_c)
        .map_err(dispersion_error)?;
    let ng = index
        .group_index(um, p.temperature_c)
        .map_err(dispersion_error)?;
    let text = format!(
        "{} {} at {} nm, {} °C\nphase index n = {n:.12}\ngroup index N = {ng:.12}\n",
        p.material, p.axis, p.wavelength_nm, p.temperature_c
    );
    let report = DispersionReport {
        citation: model.citation().to_string(),
        parameters: p,
        phase_index: n,
        group_index: ng,
    };
    stage_json(outputs, staged, &report);
    Ok(text)
}

fn cavity_figures(p: CavityParams, outputs: &Outputs, staged: &mut Staged) -> Result<String> {
    reject(outputs, "cavity", false, false)?;
    let spec = p.cavity;
    let finesse = spec.finesse().map_err(cavity_error)?;
    let airy = spec.airy_coefficient().map_err(cavity_error)?;
    let p_out = spec.pair_emission_probability().map_err(cavity_error)?;
    let rho = spec.round_trip_factor();
    let mut text = format!(
        "round-trip factor = {rho:.9}\nfinesse = {finesse:.4}\nAiry coefficient = {airy:.6}\np_out = {p_out:.6}\n"
    );
    let modes = match (p.group_index_signal, p.group_index_idler) {
        (Some(ns), Some(ni)) => {
            if !(ns > 0.0 && ni > 0.0) {
                return Err(usage("group indices must be positive"));
            }
            let figures = ModeFigures::new(
                cavity::free_spectral_range(spec.length_cm(), ns),
                cavity::free_spectral_range(spec.length_cm(), ni),
                finesse,
            );
            let m = ModeReport {
                fsr_signal_ghz: figures.fsr_signal_hz * 1e-9,
                fsr_idler_ghz: figures.fsr_idler_hz * 1e-9,
                mode_bandwidth_mhz: figures.mode_bandwidth_hz * 1e-6,
                coherence_time_ns: figures.coherence_time_s * 1e9,
            };
            let _ = write!(
                text,
                "FSR signal = {:.4} GHz\nFSR idler = {:.4} GHz\nmode bandwidth = {:.3} MHz\ncoherence time = {:.4} ns\n",
                m.fsr_signal_ghz, m.fsr_idler_ghz, m.mode_bandwidth_mhz, m.coherence_time_ns
            );
            Some(m)
        }
        _ => None,
    };
    let report = CavityReport {
        parameters: p,
        round_trip_factor: rho,
        finesse,
        airy_coefficient: airy,
        p_out,
        modes,
    };
    stage_json(outputs, staged, &report);
    Ok(text)
}

fn spectrum_plot(spectrum: &SampledSpectrum, title: String, log_y: bool) -> Plot {
    let values = spectrum
        .grid_nm
        .iter()
        .copied()
        .zip(spectrum.values.iter().copied())
        .collect();
    let mut series = vec![Series {
        label: "S".into(),
        points: values,
        dashed: false,
    }];
    if let Some(components) = &spectrum.components {
        if spectrum.provenance.source.include_phasematch {
            series.push(Series {
                label: "phase-matching envelope".into(),
                points: spectrum
                    .grid_nm
                    .iter()
                    .zip(components)
                    .map(|(&nm, c)| (nm, c.phasematch))
                    .collect(),
                dashed: true,
            });
        }
    }
    Plot {
        title,
        x_label: "signal wavelength (nm)".into(),
        y_label: "joint spectral intensity S".into(),
        log_y,
        series,
    }
}

fn csv_bytes(spectrum: &SampledSpectrum) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_spectrum_csv(spectrum, &mut buf).map_err(|e| CliError::Failure(e.to_string()))?;
    Ok(buf)
}

fn cluster_lines(text: &mut String, clusters: &[spdc_design::Cluster], max_value: f64) {
    for c in clusters {
        let _ = writeln!(
            text,
            "cluster at {:.3} nm: {} mode(s), peak {:.4}, span {:.4} nm",
            c.center_nm,
            c.modes.len(),
            c.peak_height() / max_value,
            c.span_nm
        );
    }
}

fn spectrum(
    catalog: &MaterialCatalog,
    p: SpectrumParams,
    outputs: &Outputs,
    staged: &mut Staged,
) -> Result<String> {
    let source = Source::new(catalog, p.source.clone()).map_err(spectrum_error)?;
    let mut spectrum =
        compute_spectrum(&source, p.window_nm, p.sampling).map_err(spectrum_error)?;
    if let Some(fwhm) = p.resolution_fwhm_nm {
        spectrum = convolve_resolution(&spectrum, fwhm).map_err(spectrum_error)?;
    }
    let modes = detect_modes(&spectrum, p.threshold).map_err(spectrum_error)?;
    let clusters = group_clusters(&modes, &source).map_err(spectrum_error)?;
    let max_value = spectrum.max_value();
    let mut text = format!(
        "{} points over [{}, {}] nm, step {:.3} MHz, max S = {max_value:.6}\n{} cluster(s) above {} of the maximum\n",
        spectrum.len(),
        p.window_nm.0,
        p.window_nm.1,
        spectrum.provenance.frequency_step_hz * 1e-6,
        clusters.len(),
        p.threshold
    );
    cluster_lines(&mut text, &clusters, max_value);
    if let Some(path) = &outputs.csv {
        staged.add(path, csv_bytes(&spectrum)?);
    }
    let title = format!(
        "{} {} at {} °C",
        p.source.material, p.source.interaction, p.source.temperature_c
    );
    stage_plot(outputs, staged, |log_y| {
        spectrum_plot(&spectrum, title, log_y)
    })?;
    let report = SpectrumReport {
        points: spectrum.len(),
        frequency_step_hz: spectrum.provenance.frequency_step_hz,
        mode_fwhm_hz: spectrum.provenance.mode_fwhm_hz,
        max_value,
        clusters: cluster_report(&clusters),
        parameters: p,
    };
    stage_json(outputs, staged, &report);
    Ok(text)
}

fn design(
    catalog: &MaterialCatalog,
    goal: DesignGoal,
    outputs: &Outputs,
    staged: &mut Staged,
) -> Result<String> {
    let r = design_cavity(catalog, &goal).map_err(design_error)?;
    let mut text = format!(
        "length = {:.4} cm\nR1 = {}\nR2 = {:.6}\npoling period = {:.4} µm\ntemperature = {:.3} °C\n\
         finesse = {:.3} (single-mode minimum {:.3}, M = {:.3})\n\
         mode bandwidth = {:.2} MHz = {:.4} pm\ncoherence time = {:.4} ns\np_out = {:.5}\n\
         cluster spacing = {:.3} nm\nresolvable by the detector = {}\n\
         main lobe = [{:.3}, {:.3}] nm with {} single-mode cluster(s)\n",
        r.length_cm,
        r.r1,
        r.r2,
        r.poling_period_um,
        r.temperature_c,
        r.finesse,
        r.m_min_finesse,
        r.mode_count,
        r.mode_bandwidth_mhz,
        r.mode_bandwidth_pm,
        r.coherence_time_ns,
        r.p_out,
        r.cluster_spacing_nm,
        r.resolvable,
        r.main_lobe_nm.0,
        r.main_lobe_nm.1,
        r.clusters.len()
    );
    if outputs.csv.is_some() || outputs.plot.is_some() {
        let spec = goal.source_spec(&r).map_err(design_error)?;
        let source = Source::new(catalog, spec).map_err(spectrum_error)?;
        let spectrum = compute_spectrum(&source, r.main_lobe_nm, SamplingPolicy::default())
            .map_err(spectrum_error)?;
        if let Some(path) = &outputs.csv {
            staged.add(path, csv_bytes(&spectrum)?);
        }
        let title = format!(
            "{} {}, L = {:.3} cm, T = {:.3} °C",
            goal.material, goal.interaction, r.length_cm, r.temperature_c
        );
        stage_plot(outputs, staged, |log_y| {
            spectrum_plot(&spectrum, title, log_y)
        })?;
    }
    for c in &r.clusters {
        let _ = writeln!(
            text,
            "cluster at {:.3} nm: {} mode(s)",
            c.center_nm,
            c.modes.len()
        );
    }
    stage_json(outputs, staged, &DesignReport { goal, result: r });
    Ok(text)
}

fn sweep(
    catalog: &MaterialCatalog,
    p: SweepParams,
    outputs: &Outputs,
    staged: &mut Staged,
) -> Result<String> {
    let (points, x_label, y_label, title) = match &p {
        SweepParams::Finesse {
            material,
            interaction,
            axes,
            pump_wavelength_nm,
            signal_range_nm,
            points,
            temperature_c,
            corrections,
        } => {
            let fields = FieldModels::resolve(
                catalog,
                material,
                axes.unwrap_or(interaction.field_axes()),
                corrections,
            )
            .map_err(spectrum_error)?;
            let curve = designer::finesse_curve(
                &fields,
                *pump_wavelength_nm,
                *signal_range_nm,
                *temperature_c,
                *points,
            )
            .map_err(design_error)?;
            (
                curve,
                "signal wavelength (nm)",
                "single-mode finesse",
                format!(
                    "{material} {interaction}, pump {pump_wavelength_nm} nm, {temperature_c} °C"
                ),
            )
        }
        SweepParams::Temperature {
            source,
            signal_nm,
            temperature_range_c: (lo, hi),
            points,
        } => {
            if *points < 2 || !(hi > lo) {
                return Err(usage(
                    "temperature sweep needs points >= 2 over a nonempty range",
                ));
            }
            let base = Source::new(catalog, source.clone()).map_err(spectrum_error)?;
            let curve = (0..*points)
                .into_par_iter()
                .map(|k| {
                    let t = lo + (hi - lo) * k as f64 / (*points - 1) as f64;
                    let s = base.with_temperature(t).map_err(spectrum_error)?;
                    let peak = designer::central_peak(&s, *signal_nm).map_err(design_error)?;
                    Ok((t, Some(peak)))
                })
                .collect::<Result<Vec<_>>>()?;
            (
                curve,
                "temperature (°C)",
                "central peak S",
                format!(
                    "{} {} near {signal_nm} nm",
                    source.material, source.interaction
                ),
            )
        }
    };
    let header = match &p {
        SweepParams::Finesse { .. } => "lambda_s_nm,f_single_mode",
        SweepParams::Temperature { .. } => "temperature_c,central_peak",
    };
    let defined = points.iter().filter(|q| q.1.is_some()).count();
    let mut text = format!(
        "{} points, {defined} defined; {y_label} from {} to {}\n",
        points.len(),
        fmt_extreme(&points, f64::min),
        fmt_extreme(&points, f64::max)
    );
    if let Some(path) = &outputs.csv {
        let mut csv = format!("{header}\n");
        for (x, y) in &points {
            match y {
                Some(v) => {
                    let _ = writeln!(csv, "{x:.16e},{v:.16e}");
                }
                None => {
                    let _ = writeln!(csv, "{x:.16e},");
                }
            }
        }
        staged.add(path, csv);
    }
    stage_plot(outputs, staged, |log_y| Plot {
        title,
        x_label: x_label.into(),
        y_label: y_label.into(),
        log_y,
        series: vec![Series {
            label: y_label.into(),
            points: points
                .iter()
                .map(|&(x, y)| (x, y.unwrap_or(f64::NAN)))
                .collect(),
            dashed: false,
        }],
    })?;
    let report = SweepReport {
        parameters: p,
        x_label: x_label.into(),
        y_label: y_label.into(),
        points: points.iter().map(|&(x, y)| SweepPoint { x, y }).collect(),
    };
    stage_json(outputs, staged, &report);
    if defined == 0 {
        let _ = writeln!(
            text,
            "warning: the quantity is undefined everywhere in the range"
        );
    }
    Ok(text)
}

fn fmt_extreme(points: &[(f64, Option<f64>)], pick: fn(f64, f64) -> f64) -> String {
    points
        .iter()
        .filter_map(|p| p.1)
        .reduce(pick)
        .map_or_else(|| "-".into(), |v| format!("{v:.4}"))
}
