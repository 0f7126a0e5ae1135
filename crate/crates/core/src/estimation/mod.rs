//! Parameter estimation: single-Gamma maximum likelihood, the EM algorithm
//! for finite mixtures, initialization strategies and BIC-based selection of
//! the component count.

mod em;
mod init;
mod mle;
mod select;
mod weibull;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gof::MetricReport;
use crate::mixture::MixtureModel;

pub use em::{e_step, em_fit, m_step, CollapseFloors, ResponsibilityMatrix};
pub use init::initialize;
pub use mle::{gamma_log_likelihood, gamma_mle};
pub use select::{bic, select_components, Selection, SelectionEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitStrategy {
    /// Equal-count slices of the sorted samples, each moment-fitted.
    #[default]
    Quantile,
    /// A random stochastic responsibility matrix followed by one M-step.
    RandomResponsibility,
}

impl fmt::Display for InitStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitStrategy::Quantile => "quantile",
            InitStrategy::RandomResponsibility => "random-responsibility",
        })
    }
}

impl FromStr for InitStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantile" => Ok(InitStrategy::Quantile),
            "random-responsibility" | "random" => Ok(InitStrategy::RandomResponsibility),
            other => Err(Error::domain(format!("unknown init strategy '{other}'"))),
        }
    }
}

/// EM stopping rule, restart count and collapse floors.
///
/// `variance_floor` is relative: the absolute floor applied in the M-step is
/// `variance_floor` times the variance of the full sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub max_iterations: usize,
    pub rel_loglik_tol: f64,
    pub restarts: usize,
    pub seed: u64,
    pub init_strategy: InitStrategy,
    pub weight_floor: f64,
    pub variance_floor: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            rel_loglik_tol: 1e-8,
            restarts: 8,
            seed: 0,
            init_strategy: InitStrategy::Quantile,
            weight_floor: 1e-6,
            variance_floor: 1e-12,
        }
    }
}

impl FitConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::domain("max_iterations must be >= 1"));
        }
        if !(self.rel_loglik_tol > 0.0) {
            return Err(Error::domain("rel_loglik_tol must be > 0"));
        }
        if self.restarts == 0 {
            return Err(Error::domain("restarts must be >= 1"));
        }
        if !(self.weight_floor > 0.0 && self.weight_floor < 1.0) {
            return Err(Error::domain("weight_floor must lie in (0, 1)"));
        }
        if !(self.variance_floor > 0.0) {
            return Err(Error::domain("variance_floor must be > 0"));
        }
        Ok(())
    }
}

/// Why an EM run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// Relative log-likelihood change fell below the tolerance.
    Tolerance,
    /// The next M-step would have lowered the log-likelihood; the previous
    /// model was kept. Only the moment-matching Gamma update can do this.
    LikelihoodStall,
    MaxIterations,
}

/// Outcome of one EM fit. `loglik_trace[0]` is the log-likelihood of the
/// initial model, each further entry follows one accepted M-step.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub model: MixtureModel,
    pub loglik_trace: Vec<f64>,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub restart_index: usize,
    pub metrics: Option<MetricReport>,
}

impl FitReport {
    pub fn final_loglik(&self) -> f64 {
        *self.loglik_trace.last().expect("trace holds the initial log-likelihood")
    }

    /// Largest single-step decrease in the trace (0 when non-decreasing).
    pub fn max_loglik_drop(&self) -> f64 {
        self.loglik_trace
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(0.0, f64::max)
    }
}
