use rayon::prelude::*;

use super::init::initialize_restart;
use super::weibull::weighted_weibull_mle;
use super::{FitConfig, FitReport, StopReason};
use crate::distributions::{ComponentParams, Density, Family, GammaParams, GaussianParams};
use crate::error::{Error, Result};
use crate::mixture::{Component, MixtureModel};

/// Per-sample, per-component membership probabilities, stored row-major
/// (one row per sample).
#[derive(Debug, Clone, PartialEq)]
pub struct ResponsibilityMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ResponsibilityMatrix {
    pub const ROW_SUM_TOL: f64 = 1e-9;

    /// Builds a matrix from row-major data, checking entries and row sums.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if cols == 0 || data.len() != rows * cols {
            return Err(Error::domain(format!(
                "responsibility matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        for (i, row) in data.chunks_exact(cols).enumerate() {
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::domain(format!("row {i} has an entry outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > Self::ROW_SUM_TOL {
                return Err(Error::domain(format!("row {i} sums to {sum}")));
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn n_samples(&self) -> usize {
        self.rows
    }

    pub fn n_components(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.data[i * self.cols + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn column(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().skip(k).step_by(self.cols).copied()
    }

    pub fn column_sum(&self, k: usize) -> f64 {
        self.column(k).sum()
    }
}

/// Absolute collapse thresholds applied in the M-step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseFloors {
    /// Minimum mixing proportion Σ_i φ_ik / L.
    pub weight: f64,
    /// Minimum weighted variance of a component.
    pub variance: f64,
}

impl CollapseFloors {
    pub fn for_samples(samples: &[f64], config: &FitConfig) -> Self {
        let (_, var) = mean_var(samples);
        Self {
            weight: config.weight_floor,
            variance: config.variance_floor * var,
        }
    }
}

pub(crate) fn mean_var(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// E-step: φ_ik = π_k p_k(x_i) / Σ_j π_j p_j(x_i), evaluated in log space.
pub fn e_step(model: &MixtureModel, samples: &[f64]) -> Result<ResponsibilityMatrix> {
    e_step_with_loglik(model, samples).map(|(r, _)| r)
}

/// E-step that also returns the log-likelihood of `model` on `samples`.
pub(crate) fn e_step_with_loglik(model: &MixtureModel, samples: &[f64]) -> Result<(ResponsibilityMatrix, f64)> {
    let comps = model.components();
    let m = comps.len();
    let ln_w: Vec<f64> = comps.iter().map(|c| c.weight.ln()).collect();
    let mut data = vec![0.0; samples.len() * m];
    let mut loglik = 0.0;
    for (i, (&x, row)) in samples.iter().zip(data.chunks_exact_mut(m)).enumerate() {
        let mut max = f64::NEG_INFINITY;
        for ((slot, c), lw) in row.iter_mut().zip(comps).zip(&ln_w) {
            *slot = lw + c.params.ln_pdf(x);
            max = max.max(*slot);
        }
        if max == f64::NEG_INFINITY || max.is_nan() {
            return Err(Error::ResponsibilityUndefined { index: i, value: x });
        }
        let mut total = 0.0;
        for slot in row.iter_mut() {
            *slot = (*slot - max).exp();
            total += *slot;
        }
        for slot in row.iter_mut() {
            *slot /= total;
        }
        loglik += max + total.ln();
    }
    Ok((
        ResponsibilityMatrix {
            rows: samples.len(),
            cols: m,
            data,
        },
        loglik,
    ))
}

/// M-step: mixing proportions are column means of φ; component parameters
/// come from the φ-weighted mean E and variance V. Gamma inverts E = αβ,
/// V = αβ²; Gaussian takes μ = E, σ = √V; Weibull solves the weighted
/// likelihood equations.
pub fn m_step(
    samples: &[f64],
    resp: &ResponsibilityMatrix,
    family: Family,
    floors: &CollapseFloors,
) -> Result<MixtureModel> {
    if resp.n_samples() != samples.len() {
        return Err(Error::domain(format!(
            "responsibilities cover {} samples, got {}",
            resp.n_samples(),
            samples.len()
        )));
    }
    let l = samples.len() as f64;
    let mut components = Vec::with_capacity(resp.n_components());
    for k in 0..resp.n_components() {
        let mass = resp.column_sum(k);
        if !(mass >= floors.weight * l) || mass <= 0.0 {
            return Err(Error::ComponentCollapse {
                component: k,
                effective_weight: mass / l,
                floor: floors.weight,
            });
        }
        let mean = resp.column(k).zip(samples).map(|(p, x)| p * x).sum::<f64>() / mass;
        let var = resp.column(k).zip(samples).map(|(p, x)| p * (x - mean).powi(2)).sum::<f64>() / mass;
        if !(var >= floors.variance) || var <= 0.0 {
            return Err(Error::VarianceCollapse {
                component: k,
                variance: var,
                floor: floors.variance,
            });
        }
        let params: ComponentParams = match family {
            Family::Gamma => GammaParams::from_moments(mean, var)?.into(),
            Family::Gaussian => GaussianParams::new(mean, var.sqrt())?.into(),
            Family::Weibull => {
                let ws: Vec<f64> = resp.column(k).collect();
                weighted_weibull_mle(samples, &ws)?.into()
            }
        };
        components.push(Component::new(mass / l, params));
    }
    if components.len() == 1 {
        components[0].weight = 1.0;
    }
    MixtureModel::new(components)
}

pub(crate) fn check_fit_inputs(samples: &[f64], family: Family, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::domain("component count must be >= 1"));
    }
    if samples.len() < 10 * m {
        return Err(Error::domain(format!(
            "{} samples are too few for {m} components (need >= {})",
            samples.len(),
            10 * m
        )));
    }
    for (i, &x) in samples.iter().enumerate() {
        if !x.is_finite() || (family.positive_support() && x <= 0.0) {
            return Err(Error::domain(format!("sample {i} = {x} lies outside the {family} support")));
        }
    }
    Ok(())
}

fn run_restart(
    samples: &[f64],
    family: Family,
    m: usize,
    config: &FitConfig,
    floors: &CollapseFloors,
    restart: usize,
) -> Result<FitReport> {
    let mut model = initialize_restart(samples, family, m, config.init_strategy, config.seed, restart, floors)?;
    let (mut resp, mut loglik) = e_step_with_loglik(&model, samples)?;
    let mut trace = vec![loglik];
    let mut stop = StopReason::MaxIterations;
    for _ in 0..config.max_iterations {
        let candidate = m_step(samples, &resp, family, floors)?;
        let (cand_resp, cand_loglik) = e_step_with_loglik(&candidate, samples)?;
        if cand_loglik < loglik {
            stop = StopReason::LikelihoodStall;
            break;
        }
        let rel = (cand_loglik - loglik).abs() / loglik.abs().max(f64::MIN_POSITIVE);
        model = candidate;
        resp = cand_resp;
        loglik = cand_loglik;
        trace.push(loglik);
        if rel < config.rel_loglik_tol {
            stop = StopReason::Tolerance;
            break;
        }
    }
    Ok(FitReport {
        model,
        iterations: trace.len() - 1,
        loglik_trace: trace,
        converged: stop != StopReason::MaxIterations,
        stop_reason: stop,
        restart_index: restart,
        metrics: None,
    })
}

/// Fits an `m`-component mixture of `family` by EM.
///
/// Runs `config.restarts` independent initializations (in parallel when a
/// rayon pool is available) and keeps the run with the highest final
/// log-likelihood; ties go to the lowest restart index, so the result does
/// not depend on scheduling. Restarts that collapse are dropped.
pub fn em_fit(samples: &[f64], family: Family, m: usize, config: &FitConfig) -> Result<FitReport> {
    config.validate()?;
    check_fit_inputs(samples, family, m)?;
    let floors = CollapseFloors::for_samples(samples, config);
    if !(floors.variance > 0.0) {
        return Err(Error::DegenerateData("all samples are identical".into()));
    }
    let runs: Vec<Result<FitReport>> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(samples, family, m, config, &floors, r))
        .collect();

    let mut best: Option<FitReport> = None;
    let mut diagnostics = Vec::new();
    for (r, run) in runs.into_iter().enumerate() {
        match run {
            Ok(report) => {
                let better = best
                    .as_ref()
                    .is_none_or(|b| report.final_loglik() > b.final_loglik());
                if better {
                    best = Some(report);
                }
            }
            Err(e) => diagnostics.push(format!("restart {r}: {e}")),
        }
    }
    best.ok_or(Error::FitFailed { diagnostics })
}
