//! Finite mixture models for wideband channel received-power statistics.
//!
//! The crate fits Gamma mixtures (and Gaussian / Weibull mixtures for
//! comparison) to received-power samples with the EM algorithm, scores the
//! fits with WMRD, KL divergence and a one-sample Kolmogorov–Smirnov test,
//! and ingests S21 frequency sweeps into linear power samples.
//!
//! ```
//! use mixchan::{Family, FitConfig, MixtureModel};
//!
//! let truth = MixtureModel::from_triples(Family::Gamma, &[(0.5, 2.0, 1.0), (0.5, 50.0, 0.1)]).unwrap();
//! let samples = truth.sample(5_000, 7).unwrap();
//! let report = mixchan::em_fit(&samples, Family::Gamma, 2, &FitConfig::default()).unwrap();
//! assert_eq!(report.model.n_components(), 2);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod channel;
pub mod commands;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod gof;
pub mod ingest;
pub mod mixture;
pub mod report;
pub mod rng;
pub mod special;

#[cfg(test)]
#[path = "../tests/common/quadrature.rs"]
mod testutil;

pub use distributions::{ComponentParams, Density, Family, GammaParams, GaussianParams, WeibullParams};
pub use error::{Error, Result};
pub use estimation::{
    e_step, em_fit, gamma_mle, initialize, m_step, select_components, FitConfig, FitReport, InitStrategy,
    ResponsibilityMatrix, Selection,
};
pub use gof::{Binning, Histogram, MetricReport};
pub use mixture::{Component, MixtureModel};
