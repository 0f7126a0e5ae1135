//! Goodness of fit: histograms, WMRD, KL divergence and the one-sample
//! Kolmogorov–Smirnov test.
//!
//! WMRD and KL compare the sample histogram with model-implied counts on the
//! same bins, where a bin's expected count is `n·(F(right) − F(left))`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::MixtureModel;

pub const DEFAULT_KL_EPS: f64 = 1e-12;
pub const DEFAULT_SIGNIFICANCE: f64 = 0.05;

/// How histogram bin edges are chosen.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Binning {
    /// Width 2·IQR·n^{-1/3}, spread evenly over [min, max].
    #[default]
    FreedmanDiaconis,
    /// `B` equal bins over [min, max].
    Fixed(usize),
    /// Explicit edges; the last may be +∞ and the first −∞.
    Edges(Vec<f64>),
}

impl fmt::Display for Binning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binning::FreedmanDiaconis => f.write_str("fd"),
            Binning::Fixed(b) => write!(f, "{b}"),
            Binning::Edges(e) => {
                let parts: Vec<String> = e.iter().map(|v| v.to_string()).collect();
                write!(f, "edges:{}", parts.join(";"))
            }
        }
    }
}

impl FromStr for Binning {
    type Err = Error;

    /// Accepts `fd`, a bin count, or `edges:e0;e1;...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("fd") || s.eq_ignore_ascii_case("freedman-diaconis") {
            return Ok(Binning::FreedmanDiaconis);
        }
        if let Some(list) = s.strip_prefix("edges:") {
            let edges = list
                .split(';')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::domain(format!("bad bin edge in '{s}': {e}")))?;
            return Ok(Binning::Edges(edges));
        }
        s.parse::<usize>()
            .map(Binning::Fixed)
            .map_err(|_| Error::domain(format!("unknown binning '{s}' (use fd, a bin count, or edges:...)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
    fallback: bool,
}

impl Histogram {
    /// Counts `samples` into the given edges; values outside are ignored and
    /// the rightmost edge is inclusive.
    pub fn from_edges(edges: Vec<f64>, samples: &[f64]) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::domain("a histogram needs at least two edges"));
        }
        if edges.iter().any(|e| e.is_nan()) || edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("histogram edges must be strictly increasing"));
        }
        let mut counts = vec![0u64; edges.len() - 1];
        let last = *edges.last().unwrap();
        for &x in samples {
            if x < edges[0] || x > last || x.is_nan() {
                continue;
            }
            // index of the first edge strictly greater than x
            let upper = edges.partition_point(|&e| e <= x);
            let bin = upper.saturating_sub(1).min(counts.len() - 1);
            counts[bin] += 1;
        }
        Ok(Self {
            edges,
            counts,
            fallback: false,
        })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Set when Freedman–Diaconis binning fell back to ⌈√n⌉ bins because
    /// the interquartile range was zero.
    pub fn used_fallback(&self) -> bool {
        self.fallback
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Count / (total · width) per bin, so the bars integrate to one.
    pub fn densities(&self) -> Vec<f64> {
        let total = self.total().max(1) as f64;
        self.edges
            .windows(2)
            .zip(&self.counts)
            .map(|(w, &c)| c as f64 / (total * (w[1] - w[0])))
            .collect()
    }

    /// Counts normalized to a probability vector.
    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.total().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

/// Linear-interpolation sample quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn even_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|b| lo + b as f64 * width).collect();
    edges.push(hi);
    edges
}

const MAX_BINS: usize = 100_000;

pub fn build_histogram(samples: &[f64], binning: &Binning) -> Result<Histogram> {
    if samples.len() < 2 {
        return Err(Error::domain("a histogram needs at least 2 samples"));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("histogram samples must be finite"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let range_edges = |bins: usize| -> Result<Vec<f64>> {
        if !(hi > lo) {
            return Err(Error::domain("histogram samples are all equal"));
        }
        Ok(even_edges(lo, hi, bins))
    };
    match binning {
        Binning::Edges(edges) => Histogram::from_edges(edges.clone(), samples),
        Binning::Fixed(b) => {
            if *b < 1 {
                return Err(Error::domain("fixed binning needs at least one bin"));
            }
            Histogram::from_edges(range_edges(*b)?, samples)
        }
        Binning::FreedmanDiaconis => {
            let n = sorted.len() as f64;
            let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
            if iqr > 0.0 {
                let width = 2.0 * iqr * n.powf(-1.0 / 3.0);
                let bins = ((hi - lo) / width).ceil().clamp(2.0, MAX_BINS as f64) as usize;
                Histogram::from_edges(range_edges(bins)?, samples)
            } else {
                let bins = (n.sqrt().ceil() as usize).max(2);
                let mut h = Histogram::from_edges(range_edges(bins)?, samples)?;
                h.fallback = true;
                Ok(h)
            }
        }
    }
}

/// Model-implied count per bin: `n·(F(e_{b+1}) − F(e_b))`.
pub fn expected_counts(model: &MixtureModel, hist: &Histogram, n: usize) -> Vec<f64> {
    let cdf: Vec<f64> = hist.edges().iter().map(|&e| model.cdf(e)).collect();
    cdf.windows(2).map(|w| n as f64 * (w[1] - w[0]).max(0.0)).collect()
}

/// Weighted mean relative difference Σ|y − ŷ| / (½·Σ(y + ŷ)), in [0, 2].
pub fn wmrd(actual: &[f64], expected: &[f64]) -> Result<f64> {
    if actual.len() != expected.len() {
        return Err(Error::domain(format!(
            "wmrd length mismatch: {} vs {}",
            actual.len(),
            expected.len()
        )));
    }
    let diff: f64 = actual.iter().zip(expected).map(|(a, e)| (a - e).abs()).sum();
    let mass: f64 = actual.iter().zip(expected).map(|(a, e)| a + e).sum();
    if !(mass > 0.0) {
        return Err(Error::domain("wmrd of two all-zero vectors is undefined"));
    }
    Ok(diff / (0.5 * mass))
}

fn normalized(v: &[f64], name: &str) -> Result<Vec<f64>> {
    if v.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::domain(format!("{name} has negative or non-finite entries")));
    }
    let total: f64 = v.iter().sum();
    if !(total > 0.0) {
        return Err(Error::domain(format!("{name} has no mass")));
    }
    Ok(v.iter().map(|p| p / total).collect())
}

/// KL(P‖Q) = Σ P ln(P/Q) in nats.
///
/// Q is smoothed by adding `smoothing_eps` to every entry; both vectors are
/// then renormalized. Bins with P = 0 contribute nothing.
pub fn kl_divergence(actual: &[f64], estimated: &[f64], smoothing_eps: f64) -> Result<f64> {
    if actual.len() != estimated.len() {
        return Err(Error::domain(format!(
            "kl length mismatch: {} vs {}",
            actual.len(),
            estimated.len()
        )));
    }
    if !(smoothing_eps >= 0.0) {
        return Err(Error::domain("smoothing_eps must be >= 0"));
    }
    let p = normalized(actual, "actual distribution")?;
    let smoothed: Vec<f64> = estimated.iter().map(|q| q + smoothing_eps).collect();
    let q = normalized(&smoothed, "estimated distribution")?;
    let mut kl = 0.0;
    for (pi, qi) in p.iter().zip(&q) {
        if *pi > 0.0 {
            if *qi <= 0.0 {
                return Ok(f64::INFINITY);
            }
            kl += pi * (pi / qi).ln();
        }
    }
    Ok(kl.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub critical: f64,
    pub passed: bool,
}

/// Asymptotic one-sample KS coefficient c(α) = √(−ln(α/2)/2).
pub fn ks_coefficient(significance: f64) -> f64 {
    (-(significance / 2.0).ln() / 2.0).sqrt()
}

/// D = max_i max(i/n − F(x_(i)), F(x_(i)) − (i−1)/n).
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
        .clamp(0.0, 1.0)
}

pub const KS_MIN_SAMPLES: usize = 5;

/// One-sample KS test against an arbitrary CDF.
pub fn ks_test_cdf<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, significance: f64) -> Result<KsOutcome> {
    if samples.len() < KS_MIN_SAMPLES {
        return Err(Error::domain(format!(
            "ks_test needs at least {KS_MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::domain("significance must lie in (0, 1)"));
    }
    let statistic = ks_statistic(samples, cdf);
    let critical = ks_coefficient(significance) / (samples.len() as f64).sqrt();
    Ok(KsOutcome {
        statistic,
        critical,
        passed: statistic < critical,
    })
}

pub fn ks_test(samples: &[f64], model: &MixtureModel, significance: f64) -> Result<KsOutcome> {
    ks_test_cdf(samples, |x| model.cdf(x), significance)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub wmrd: f64,
    pub kl_nats: f64,
    pub ks_stat: f64,
    pub ks_critical: f64,
    pub ks_passed: bool,
    pub bin_count: usize,
}

/// Scores `model` against `samples` on the histogram `hist`.
pub fn evaluate_on(model: &MixtureModel, samples: &[f64], hist: &Histogram) -> Result<MetricReport> {
    let actual: Vec<f64> = hist.counts().iter().map(|&c| c as f64).collect();
    let expected = expected_counts(model, hist, hist.total() as usize);
    let ks = ks_test(samples, model, DEFAULT_SIGNIFICANCE)?;
    Ok(MetricReport {
        wmrd: wmrd(&actual, &expected)?,
        kl_nats: kl_divergence(&actual, &expected, DEFAULT_KL_EPS)?,
        ks_stat: ks.statistic,
        ks_critical: ks.critical,
        ks_passed: ks.passed,
        bin_count: hist.n_bins(),
    })
}

pub fn evaluate(model: &MixtureModel, samples: &[f64], binning: &Binning) -> Result<MetricReport> {
    let hist = build_histogram(samples, binning)?;
    evaluate_on(model, samples, &hist)
}
