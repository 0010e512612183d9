//! Wavelength- and temperature-dependent refractive indices.
//!
//! Every model carries its validity window and refuses to extrapolate.
//! Group indices are obtained by central differences on the phase index so
//! that every functional form shares one code path.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative step used for the central-difference derivative `dn/dλ`.
pub const GROUP_INDEX_REL_STEP: f64 = 1e-5;

const BUILTIN_CATALOG: &str = include_str!("../data/catalog.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Ordinary,
    Extraordinary,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Ordinary => f.write_str("ordinary"),
            Axis::Extraordinary => f.write_str("extraordinary"),
        }
    }
}

/// Which side of a validity interval was violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Lower => f.write_str("lower"),
            Bound::Upper => f.write_str("upper"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DispersionError {
    #[error("wavelength {wavelength_um} um violates the {bound} bound of the {material} {axis} model (valid {lo}..{hi} um)")]
    WavelengthOutOfRange {
        material: String,
        axis: Axis,
        wavelength_um: f64,
        lo: f64,
        hi: f64,
        bound: Bound,
    },
    #[error("temperature {temperature_c} C violates the {bound} bound of the {material} {axis} model (valid {lo}..{hi} C)")]
    TemperatureOutOfRange {
        material: String,
        axis: Axis,
        temperature_c: f64,
        lo: f64,
        hi: f64,
        bound: Bound,
    },
    #[error("wavelength {wavelength_um} um is too close to the {bound} validity bound of the {material} {axis} model for the group-index stencil")]
    StencilOutOfRange {
        material: String,
        axis: Axis,
        wavelength_um: f64,
        bound: Bound,
    },
    #[error("{material} {axis}: index n = {n} at {wavelength_um} um is not a physical refractive index (must be real and > 1)")]
    NonPhysicalIndex {
        material: String,
        axis: Axis,
        wavelength_um: f64,
        n: f64,
    },
    #[error("coefficient `{name}` is not part of the `{form}` form")]
    UnknownCoefficient { form: SellmeierForm, name: String },
    #[error("coefficient `{name}` required by the `{form}` form is missing")]
    MissingCoefficient {
        form: SellmeierForm,
        name: &'static str,
    },
    #[error("no catalog entry for {material} {axis}")]
    NotInCatalog { material: String, axis: Axis },
    #[error("duplicate catalog entry for {material} {axis}")]
    DuplicateEntry { material: String, axis: Axis },
    #[error("catalog parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("catalog entry {index} ({material}), field `{field}`: {message}")]
    Schema {
        index: usize,
        material: String,
        field: String,
        message: String,
    },
    #[error("cannot read catalog {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = DispersionError> = std::result::Result<T, E>;

/// Functional form of a dispersion model.
///
/// `Jundt` and `EdwardsLawrence` are temperature-dependent Sellmeier forms
/// for lithium niobate; `BierleinVanherzeele` is a room-temperature
/// two-term form; `Constant` is a dispersionless index used for testing and
/// for idealised what-if studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SellmeierForm {
    /// `n² = a1 + b1 f + (a2 + b2 f)/(λ² − (a3 + b3 f)²) + (a4 + b4 f)/(λ² − a5²) − a6 λ²`,
    /// `f = (T − 24.5)(T + 570.82)`.
    Jundt,
    /// `n² = a1 + (a2 + b1 F)/(λ² − (a3 + b2 F)²) + b3 F − a4 λ²`,
    /// `F = (T − 24.5)(T + 570.5)`.
    EdwardsLawrence,
    /// `n² = a + b/(λ² − c) − d λ²`.
    BierleinVanherzeele,
    /// `n = n`.
    Constant,
}

impl SellmeierForm {
    /// Coefficient names in evaluation order.
    pub fn coefficient_names(self) -> &'static [&'static str] {
        match self {
            SellmeierForm::Jundt => &["a1", "a2", "a3", "a4", "a5", "a6", "b1", "b2", "b3", "b4"],
            SellmeierForm::EdwardsLawrence => &["a1", "a2", "a3", "a4", "b1", "b2", "b3"],
            SellmeierForm::BierleinVanherzeele => &["a", "b", "c", "d"],
            SellmeierForm::Constant => &["n"],
        }
    }

    pub fn temperature_dependent(self) -> bool {
        matches!(self, SellmeierForm::Jundt | SellmeierForm::EdwardsLawrence)
    }

    fn index_squared(self, c: &[f64], wavelength_um: f64, temperature_c: f64) -> f64 {
        let l2 = wavelength_um * wavelength_um;
        match self {
            SellmeierForm::Jundt => {
                let f = (temperature_c - 24.5) * (temperature_c + 570.82);
                let pole = c[2] + c[8] * f;
                c[0] + c[6] * f
                    + (c[1] + c[7] * f) / (l2 - pole * pole)
                    + (c[3] + c[9] * f) / (l2 - c[4] * c[4])
                    - c[5] * l2
            }
            SellmeierForm::EdwardsLawrence => {
                let f = (temperature_c - 24.5) * (temperature_c + 570.5);
                let pole = c[2] + c[5] * f;
                c[0] + (c[1] + c[4] * f) / (l2 - pole * pole) + c[6] * f - c[3] * l2
            }
            SellmeierForm::BierleinVanherzeele => c[0] + c[1] / (l2 - c[2]) - c[3] * l2,
            SellmeierForm::Constant => c[0] * c[0],
        }
    }
}

impl fmt::Display for SellmeierForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SellmeierForm::Jundt => "jundt",
            SellmeierForm::EdwardsLawrence => "edwards_lawrence",
            SellmeierForm::BierleinVanherzeele => "bierlein_vanherzeele",
            SellmeierForm::Constant => "constant",
        };
        f.write_str(s)
    }
}

/// A named dispersion model for one crystal axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionModel {
    material: String,
    axis: Axis,
    form: SellmeierForm,
    coefficients: Vec<f64>,
    wavelength_range_um: (f64, f64),
    temperature_range_c: (f64, f64),
    citation: String,
}

impl DispersionModel {
    pub fn new(
        material: impl Into<String>,
        axis: Axis,
        form: SellmeierForm,
        coefficients: &BTreeMap<String, f64>,
        wavelength_range_um: (f64, f64),
        temperature_range_c: (f64, f64),
        citation: impl Into<String>,
    ) -> Result<Self> {
        for name in coefficients.keys() {
            if !form.coefficient_names().contains(&name.as_str()) {
                return Err(DispersionError::UnknownCoefficient {
                    form,
                    name: name.clone(),
                });
            }
        }
        let values = form
            .coefficient_names()
            .iter()
            .map(|&name| {
                coefficients
                    .get(name)
                    .copied()
                    .ok_or(DispersionError::MissingCoefficient { form, name })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            material: material.into(),
            axis,
            form,
            coefficients: values,
            wavelength_range_um,
            temperature_range_c,
            citation: citation.into(),
        })
    }

    /// A dispersionless model, mostly useful for tests and idealised studies.
    pub fn constant(material: impl Into<String>, axis: Axis, n: f64) -> Self {
        Self {
            material: material.into(),
            axis,
            form: SellmeierForm::Constant,
            coefficients: vec![n],
            wavelength_range_um: (0.2, 10.0),
            temperature_range_c: (-273.15, 1000.0),
            citation: "dispersionless test model".into(),
        }
    }

    pub fn material(&self) -> &str {
        &self.material
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn form(&self) -> SellmeierForm {
        self.form
    }

    pub fn wavelength_range_um(&self) -> (f64, f64) {
        self.wavelength_range_um
    }

    pub fn temperature_range_c(&self) -> (f64, f64) {
        self.temperature_range_c
    }

    pub fn citation(&self) -> &str {
        &self.citation
    }

    pub fn coefficients(&self) -> BTreeMap<String, f64> {
        self.form
            .coefficient_names()
            .iter()
            .zip(&self.coefficients)
            .map(|(name, value)| (name.to_string(), *value))
            .collect()
    }

    /// Returns a copy with some coefficients replaced. Names must belong to the form.
    pub fn with_overrides(&self, overrides: &BTreeMap<String, f64>) -> Result<Self> {
        let mut merged = self.coefficients();
        for (name, value) in overrides {
            if !merged.contains_key(name) {
                return Err(DispersionError::UnknownCoefficient {
                    form: self.form,
                    name: name.clone(),
                });
            }
            merged.insert(name.clone(), *value);
        }
        Self::new(
            self.material.clone(),
            self.axis,
            self.form,
            &merged,
            self.wavelength_range_um,
            self.temperature_range_c,
            self.citation.clone(),
        )
    }

    fn check_wavelength(&self, wavelength_um: f64) -> Result<()> {
        let (lo, hi) = self.wavelength_range_um;
        let bound = if !(wavelength_um >= lo) {
            Bound::Lower
        } else if !(wavelength_um <= hi) {
            Bound::Upper
        } else {
            return Ok(());
        };
        Err(DispersionError::WavelengthOutOfRange {
            material: self.material.clone(),
            axis: self.axis,
            wavelength_um,
            lo,
            hi,
            bound,
        })
    }

    fn check_temperature(&self, temperature_c: f64) -> Result<()> {
        let (lo, hi) = self.temperature_range_c;
        let bound = if !(temperature_c >= lo) {
            Bound::Lower
        } else if !(temperature_c <= hi) {
            Bound::Upper
        } else {
            return Ok(());
        };
        Err(DispersionError::TemperatureOutOfRange {
            material: self.material.clone(),
            axis: self.axis,
            temperature_c,
            lo,
            hi,
            bound,
        })
    }

    /// Bulk refractive index.
    pub fn bulk_index(&self, wavelength_um: f64, temperature_c: f64) -> Result<f64> {
        self.check_wavelength(wavelength_um)?;
        self.check_temperature(temperature_c)?;
        let n = self
            .form
            .index_squared(&self.coefficients, wavelength_um, temperature_c)
            .sqrt();
        self.physical(n, wavelength_um)
    }

    fn physical(&self, n: f64, wavelength_um: f64) -> Result<f64> {
        if n.is_finite() && n > 1.0 {
            Ok(n)
        } else {
            Err(DispersionError::NonPhysicalIndex {
                material: self.material.clone(),
                axis: self.axis,
                wavelength_um,
                n,
            })
        }
    }
}

/// Waveguide adaptation applied on top of a bulk model.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "payload", rename_all = "snake_case")]
pub enum WaveguideCorrection {
    /// Bulk dispersion.
    #[default]
    None,
    /// Replacement values for some of the model's Sellmeier coefficients.
    CoefficientOverrides(BTreeMap<String, f64>),
    /// Additive offset `Δn(λ) = c0 + c1 λ + c2 λ² + …` with λ in micrometers.
    AdditiveIndexOffset(Vec<f64>),
}

/// A bulk model bound to its waveguide correction: the effective index seen by a guided field.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveIndex {
    model: DispersionModel,
    offset: Vec<f64>,
}

impl EffectiveIndex {
    pub fn new(model: &DispersionModel, correction: &WaveguideCorrection) -> Result<Self> {
        Ok(match correction {
            WaveguideCorrection::None => Self {
                model: model.clone(),
                offset: Vec::new(),
            },
            WaveguideCorrection::CoefficientOverrides(overrides) => Self {
                model: model.with_overrides(overrides)?,
                offset: Vec::new(),
            },
            WaveguideCorrection::AdditiveIndexOffset(poly) => Self {
                model: model.clone(),
                offset: poly.clone(),
            },
        })
    }

    pub fn model(&self) -> &DispersionModel {
        &self.model
    }

    fn offset_at(&self, wavelength_um: f64) -> f64 {
        self.offset
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * wavelength_um + c)
    }

    pub fn refractive_index(&self, wavelength_um: f64, temperature_c: f64) -> Result<f64> {
        let bulk = self.model.bulk_index(wavelength_um, temperature_c)?;
        if self.offset.is_empty() {
            return Ok(bulk);
        }
        self.model
            .physical(bulk + self.offset_at(wavelength_um), wavelength_um)
    }

    /// Group index `N = n − λ dn/dλ` by central difference with relative step `GROUP_INDEX_REL_STEP`.
    pub fn group_index(&self, wavelength_um: f64, temperature_c: f64) -> Result<f64> {
        self.group_index_with_step(wavelength_um, temperature_c, GROUP_INDEX_REL_STEP)
    }

    pub(crate) fn group_index_with_step(
        &self,
        wavelength_um: f64,
        temperature_c: f64,
        rel_step: f64,
    ) -> Result<f64> {
        let n = self.refractive_index(wavelength_um, temperature_c)?;
        let h = rel_step * wavelength_um;
        let (lo, hi) = self.model.wavelength_range_um;
        let stencil_error = |bound| DispersionError::StencilOutOfRange {
            material: self.model.material.clone(),
            axis: self.model.axis,
            wavelength_um,
            bound,
        };
        if wavelength_um - h < lo {
            return Err(stencil_error(Bound::Lower));
        }
        if wavelength_um + h > hi {
            return Err(stencil_error(Bound::Upper));
        }
        let up = self.refractive_index(wavelength_um + h, temperature_c)?;
        let down = self.refractive_index(wavelength_um - h, temperature_c)?;
        let slope = (up - down) / (2.0 * h);
        Ok(n - wavelength_um * slope)
    }
}

pub fn refractive_index(
    model: &DispersionModel,
    correction: &WaveguideCorrection,
    wavelength_um: f64,
    temperature_c: f64,
) -> Result<f64> {
    EffectiveIndex::new(model, correction)?.refractive_index(wavelength_um, temperature_c)
}

pub fn group_index(
    model: &DispersionModel,
    correction: &WaveguideCorrection,
    wavelength_um: f64,
    temperature_c: f64,
) -> Result<f64> {
    EffectiveIndex::new(model, correction)?.group_index(wavelength_um, temperature_c)
}

/// On-disk catalog record. Field names are part of the file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub material: String,
    pub axis: Axis,
    pub form: SellmeierForm,
    pub coefficients: BTreeMap<String, f64>,
    pub wavelength_range_um: [f64; 2],
    pub temperature_range_c: [f64; 2],
    pub citation: String,
}

impl From<&DispersionModel> for CatalogEntry {
    fn from(model: &DispersionModel) -> Self {
        Self {
            material: model.material.clone(),
            axis: model.axis,
            form: model.form,
            coefficients: model.coefficients(),
            wavelength_range_um: [model.wavelength_range_um.0, model.wavelength_range_um.1],
            temperature_range_c: [model.temperature_range_c.0, model.temperature_range_c.1],
            citation: model.citation.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogSource<'a> {
    BuiltIn,
    /// Built-in entries overlaid by the entries of a catalog file.
    File(&'a Path),
}

/// Immutable map from (material, axis) to dispersion model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MaterialCatalog {
    entries: BTreeMap<(String, Axis), DispersionModel>,
}

impl MaterialCatalog {
    pub fn builtin() -> Self {
        Self::from_json_str(BUILTIN_CATALOG).expect("built-in catalog is valid")
    }

    /// Parses a catalog document on its own, without the built-in entries.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: Vec<CatalogEntry> =
            serde_json::from_str(text).map_err(|e| DispersionError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        let mut entries = BTreeMap::new();
        for (index, entry) in raw.into_iter().enumerate() {
            let model = model_from_entry(index, &entry)?;
            let key = (entry.material.clone(), entry.axis);
            if entries.contains_key(&key) {
                return Err(DispersionError::DuplicateEntry {
                    material: entry.material,
                    axis: entry.axis,
                });
            }
            entries.insert(key, model);
        }
        Ok(Self { entries })
    }

    pub fn get(&self, material: &str, axis: Axis) -> Result<&DispersionModel> {
        self.entries
            .get(&(material.to_string(), axis))
            .ok_or_else(|| DispersionError::NotInCatalog {
                material: material.to_string(),
                axis,
            })
    }

    pub fn insert(&mut self, model: DispersionModel) {
        self.entries
            .insert((model.material.clone(), model.axis), model);
    }

    /// Entries of `other` replace entries with the same key.
    pub fn overlay(&mut self, other: MaterialCatalog) {
        self.entries.extend(other.entries);
    }

    pub fn models(&self) -> impl Iterator<Item = &DispersionModel> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> String {
        let raw: Vec<CatalogEntry> = self.models().map(CatalogEntry::from).collect();
        serde_json::to_string_pretty(&raw).expect("catalog serializes")
    }
}

fn model_from_entry(index: usize, entry: &CatalogEntry) -> Result<DispersionModel> {
    let schema = |field: &str, message: String| DispersionError::Schema {
        index,
        material: entry.material.clone(),
        field: field.to_string(),
        message,
    };
    let [wlo, whi] = entry.wavelength_range_um;
    if !(wlo > 0.0 && whi > wlo) {
        return Err(schema(
            "wavelength_range_um",
            format!("expected 0 < lo < hi, got [{wlo}, {whi}]"),
        ));
    }
    let [tlo, thi] = entry.temperature_range_c;
    if !(thi >= tlo) {
        return Err(schema(
            "temperature_range_c",
            format!("expected lo <= hi, got [{tlo}, {thi}]"),
        ));
    }
    DispersionModel::new(
        entry.material.clone(),
        entry.axis,
        entry.form,
        &entry.coefficients,
        (wlo, whi),
        (tlo, thi),
        entry.citation.clone(),
    )
    .map_err(|e| match &e {
        DispersionError::UnknownCoefficient { name, .. } => {
            schema(&format!("coefficients.{name}"), e.to_string())
        }
        DispersionError::MissingCoefficient { name, .. } => {
            schema(&format!("coefficients.{name}"), e.to_string())
        }
        _ => e,
    })
}

pub fn load_material_catalog(source: CatalogSource<'_>) -> Result<MaterialCatalog> {
    let mut catalog = MaterialCatalog::builtin();
    if let CatalogSource::File(path) = source {
        let text = std::fs::read_to_string(path).map_err(|e| DispersionError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        catalog.overlay(MaterialCatalog::from_json_str(&text)?);
    }
    Ok(catalog)
}
