//! Text exports: dense spectra as CSV and cluster summaries as JSON.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::spectrum::{Cluster, SampledSpectrum};

pub const SPECTRUM_CSV_HEADER: &str = "lambda_s_nm,lambda_i_nm,airy_s,airy_i,phasematch,S";

/// One row per grid point with 17 significant digits.
///
/// After convolution the per-point factors no longer exist and their
/// columns are left empty.
pub fn write_spectrum_csv<W: Write>(spectrum: &SampledSpectrum, mut out: W) -> io::Result<()> {
    writeln!(out, "{SPECTRUM_CSV_HEADER}")?;
    for (i, (&nm, &s)) in spectrum.grid_nm.iter().zip(&spectrum.values).enumerate() {
        match &spectrum.components {
            Some(c) => {
                let c = &c[i];
                writeln!(
                    out,
                    "{nm:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{s:.16e}",
                    c.lambda_i_nm, c.airy_s, c.airy_i, c.phasematch
                )?;
            }
            None => writeln!(out, "{nm:.16e},{:.16e},,,,{s:.16e}", spectrum.idler_nm(i))?,
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeRecord {
    pub center_nm: f64,
    pub height: f64,
    pub fwhm_pm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterRecord {
    pub center_nm: f64,
    pub span_nm: f64,
    pub modes: Vec<ModeRecord>,
}

impl From<&Cluster> for ClusterRecord {
    fn from(cluster: &Cluster) -> Self {
        Self {
            center_nm: cluster.center_nm,
            span_nm: cluster.span_nm,
            modes: cluster
                .modes
                .iter()
                .map(|m| ModeRecord {
                    center_nm: m.center_nm,
                    height: m.height,
                    fwhm_pm: m.fwhm_nm * 1e3,
                })
                .collect(),
        }
    }
}

pub fn cluster_report(clusters: &[Cluster]) -> Vec<ClusterRecord> {
    clusters.iter().map(ClusterRecord::from).collect()
}
