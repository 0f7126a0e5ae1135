//! JSON report documents written by the command-line front end.
//!
//! Every document carries `schema_version` and the [`RunManifest`] that
//! produced it. Reports contain no timestamps or host data, so re-running a
//! manifest reproduces its report byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::Family;
use crate::error::{Error, Result};
use crate::estimation::{FitConfig, FitReport, StopReason};
use crate::gof::MetricReport;
use crate::mixture::MixtureModel;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub families: Vec<Family>,
    /// Component counts tried; `select` lists its whole range.
    pub components: Vec<usize>,
    pub config: FitConfig,
    pub binning: String,
    /// Frequency band in Hz applied to sweep inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_hz: Option<(f64, f64)>,
    pub output_dir: String,
    pub emitted: Vec<String>,
}

/// Fitted model with its EM trace and goodness-of-fit metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSection {
    pub model: MixtureModel,
    pub loglik_trace: Vec<f64>,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub restart_index: usize,
    pub metrics: MetricReport,
}

impl FitSection {
    pub fn from_report(report: &FitReport, metrics: MetricReport) -> Self {
        Self {
            model: report.model.clone(),
            loglik_trace: report.loglik_trace.clone(),
            converged: report.converged,
            stop_reason: report.stop_reason,
            iterations: report.iterations,
            restart_index: report.restart_index,
            metrics,
        }
    }

    pub fn final_loglik(&self) -> f64 {
        self.loglik_trace.last().copied().unwrap_or(f64::NAN)
    }
}

/// Single-Gamma maximum-likelihood fit reported next to a mixture fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSection {
    pub model: MixtureModel,
    pub loglik: f64,
    pub metrics: MetricReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub input_kind: String,
    pub source_label: String,
    pub n_samples: usize,
    pub dropped_records: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDocument {
    pub schema_version: u32,
    pub manifest: RunManifest,
    pub samples: SampleSummary,
    #[serde(flatten)]
    pub fit: FitSection,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mle_baseline: Option<BaselineSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFit {
    pub rank: usize,
    pub family: Family,
    pub kl_nats: f64,
    pub wmrd: f64,
    pub ks_stat: f64,
    pub ks_passed: bool,
    pub loglik: f64,
    pub fit: FitSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFailure {
    pub family: Family,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareDocument {
    pub schema_version: u32,
    pub manifest: RunManifest,
    pub samples: SampleSummary,
    /// Sorted by KL divergence, smallest first.
    pub ranking: Vec<RankedFit>,
    pub failures: Vec<FamilyFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicRow {
    pub m: usize,
    pub n_params: usize,
    pub loglik: Option<f64>,
    pub bic: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectDocument {
    pub schema_version: u32,
    pub manifest: RunManifest,
    pub samples: SampleSummary,
    pub selected_m: usize,
    pub bic_table: Vec<BicRow>,
    pub reports: Vec<FitSection>,
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}

pub fn read_document<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<T> {
    let text = std::fs::read_to_string(path.as_ref())?;
    serde_json::from_str(&text).map_err(|e| Error::Load(e.to_string()))
}
