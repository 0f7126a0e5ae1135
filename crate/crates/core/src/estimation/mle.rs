use crate::distributions::GammaParams;
use crate::error::{Error, Result};
use crate::special::{ln_gamma_unchecked, ln_minus_digamma_unchecked, trigamma_unchecked};

const MAX_NEWTON_ITER: usize = 100;
const NEWTON_STEP_TOL: f64 = 1e-10;

/// Gamma log-likelihood of `samples` under (shape, scale).
pub fn gamma_log_likelihood(samples: &[f64], shape: f64, scale: f64) -> f64 {
    let n = samples.len() as f64;
    let sum: f64 = samples.iter().sum();
    let sum_ln: f64 = samples.iter().map(|x| x.ln()).sum();
    (shape - 1.0) * sum_ln - sum / scale - n * shape * scale.ln() - n * ln_gamma_unchecked(shape)
}

/// Maximum-likelihood Gamma fit.
///
/// The scale is profiled out (β = x̄/α), leaving
/// `ln α − ψ(α) = ln x̄ − mean(ln x)` which is solved by Newton–Raphson
/// from the Minka closed-form approximation.
pub fn gamma_mle(samples: &[f64]) -> Result<GammaParams> {
    if samples.len() < 2 {
        return Err(Error::domain("gamma_mle requires at least 2 samples"));
    }
    if let Some((i, x)) = samples.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::domain(format!("gamma_mle requires positive samples, sample {i} is {x}")));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let mean_ln = samples.iter().map(|x| x.ln()).sum::<f64>() / n;
    let first = samples[0];
    let s = mean.ln() - mean_ln;
    if samples.iter().all(|&x| x == first) || !(s > 0.0) {
        return Err(Error::DegenerateData("gamma_mle: zero spread in ln(samples)".into()));
    }

    let mut alpha = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
    for _ in 0..MAX_NEWTON_ITER {
        let f = ln_minus_digamma_unchecked(alpha) - s;
        let df = 1.0 / alpha - trigamma_unchecked(alpha);
        let mut next = alpha - f / df;
        if !(next > 0.0) || !next.is_finite() {
            next = 0.5 * alpha;
        }
        let step = (next - alpha).abs();
        alpha = next;
        // absolute tolerance, relaxed to relative once α exceeds 1
        if step < NEWTON_STEP_TOL * alpha.max(1.0) {
            return GammaParams::new(alpha, mean / alpha);
        }
    }
    Err(Error::Convergence {
        solver: "gamma_mle Newton-Raphson",
        iterations: MAX_NEWTON_ITER,
        last_iterate: alpha,
    })
}
