use std::ops::RangeInclusive;

use super::{em_fit, FitConfig, FitReport};
use crate::distributions::Family;
use crate::error::{Error, Result};

pub const MAX_SELECTABLE_COMPONENTS: usize = 8;

/// Bayesian information criterion, −2·lnL + p·ln n.
pub fn bic(loglik: f64, n_params: usize, n_samples: usize) -> f64 {
    -2.0 * loglik + n_params as f64 * (n_samples as f64).ln()
}

#[derive(Debug, Clone)]
pub struct SelectionEntry {
    pub m: usize,
    /// The fit, or the error message that excluded this `m`.
    pub outcome: std::result::Result<FitReport, String>,
    pub bic: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Selection {
    pub best_m: usize,
    pub entries: Vec<SelectionEntry>,
}

impl Selection {
    pub fn reports(&self) -> impl Iterator<Item = &FitReport> {
        self.entries.iter().filter_map(|e| e.outcome.as_ref().ok())
    }

    pub fn best(&self) -> &FitReport {
        self.reports()
            .find(|r| r.model.n_components() == self.best_m)
            .expect("selected m has a report")
    }
}

/// Fits every `m` in `m_range` and picks the minimum-BIC component count.
/// A failed fit for one `m` only excludes that `m`.
pub fn select_components(
    samples: &[f64],
    family: Family,
    m_range: RangeInclusive<usize>,
    config: &FitConfig,
) -> Result<Selection> {
    let (lo, hi) = (*m_range.start(), *m_range.end());
    if lo < 1 || hi > MAX_SELECTABLE_COMPONENTS || lo > hi {
        return Err(Error::domain(format!(
            "component range {lo}..={hi} must lie within 1..={MAX_SELECTABLE_COMPONENTS}"
        )));
    }
    let mut entries = Vec::new();
    let mut best: Option<(f64, usize)> = None;
    for m in m_range {
        match em_fit(samples, family, m, config) {
            Ok(report) => {
                let score = bic(report.final_loglik(), report.model.n_free_params(), samples.len());
                if best.is_none_or(|(b, _)| score < b) {
                    best = Some((score, m));
                }
                entries.push(SelectionEntry {
                    m,
                    outcome: Ok(report),
                    bic: Some(score),
                });
            }
            Err(e) => entries.push(SelectionEntry {
                m,
                outcome: Err(e.to_string()),
                bic: None,
            }),
        }
    }
    match best {
        Some((_, best_m)) => Ok(Selection { best_m, entries }),
        None => Err(Error::FitFailed {
            diagnostics: entries
                .into_iter()
                .filter_map(|e| e.outcome.err().map(|msg| format!("m={}: {msg}", e.m)))
                .collect(),
        }),
    }
}
