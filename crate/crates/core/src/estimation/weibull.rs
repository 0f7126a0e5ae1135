//! Weighted maximum-likelihood Weibull fit, used as the Weibull M-step.
//!
//! With weights w_i the scale profiles out as λ^k = Σ w x^k / Σ w and the
//! shape solves
//!
//!   g(k) = Σ w x^k ln x / Σ w x^k − 1/k − Σ w ln x / Σ w = 0,
//!
//! where g is increasing in k. Sums run in log space on x / max(x) so large
//! shapes neither overflow nor underflow.

use crate::distributions::WeibullParams;
use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

struct Profile<'a> {
    ln_w: Vec<f64>,
    ly: &'a [f64],
    mean_ly: f64,
}

impl Profile<'_> {
    /// Returns (ln S0, S1/S0, S2/S0) with S_j = Σ w ly^j e^{k·ly}.
    fn sums(&self, k: f64) -> (f64, f64, f64) {
        let max = self
            .ln_w
            .iter()
            .zip(self.ly)
            .map(|(lw, ly)| lw + k * ly)
            .fold(f64::NEG_INFINITY, f64::max);
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for (lw, &ly) in self.ln_w.iter().zip(self.ly) {
            let t = (lw + k * ly - max).exp();
            s0 += t;
            s1 += t * ly;
            s2 += t * ly * ly;
        }
        (max + s0.ln(), s1 / s0, s2 / s0)
    }

    fn score(&self, k: f64) -> (f64, f64) {
        let (_, r1, r2) = self.sums(k);
        let g = r1 - 1.0 / k - self.mean_ly;
        let dg = (r2 - r1 * r1).max(0.0) + 1.0 / (k * k);
        (g, dg)
    }
}

pub(crate) fn weighted_weibull_mle(xs: &[f64], ws: &[f64]) -> Result<WeibullParams> {
    debug_assert_eq!(xs.len(), ws.len());
    let mut pts_x = Vec::with_capacity(xs.len());
    let mut ln_w = Vec::with_capacity(xs.len());
    let mut total_w = 0.0;
    for (&x, &w) in xs.iter().zip(ws) {
        if w > 0.0 {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::domain(format!("weibull fit requires positive samples, got {x}")));
            }
            pts_x.push(x);
            ln_w.push(w.ln());
            total_w += w;
        }
    }
    if pts_x.is_empty() || !(total_w > 0.0) {
        return Err(Error::DegenerateData("weibull fit: no positive weight".into()));
    }
    let c = pts_x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ly: Vec<f64> = pts_x.iter().map(|x| (x / c).ln()).collect();
    let norm_w: Vec<f64> = ln_w.iter().map(|lw| (lw - total_w.ln()).exp()).collect();
    let mean_ly: f64 = norm_w.iter().zip(&ly).map(|(w, l)| w * l).sum();
    let var_ly: f64 = norm_w.iter().zip(&ly).map(|(w, l)| w * (l - mean_ly).powi(2)).sum();
    if !(var_ly > 0.0) {
        return Err(Error::DegenerateData("weibull fit: zero spread in ln(samples)".into()));
    }
    let profile = Profile { ln_w, ly: &ly, mean_ly };

    // Gumbel moment estimate for ln X: Var = π² / (6 k²)
    let mut k = std::f64::consts::PI / (6.0 * var_ly).sqrt();
    let (mut lo, mut hi) = (k, k);
    let mut guard = 0;
    while profile.score(lo).0 > 0.0 {
        lo *= 0.5;
        guard += 1;
        if guard > MAX_ITER {
            return Err(Error::Convergence {
                solver: "weibull shape bracket",
                iterations: guard,
                last_iterate: lo,
            });
        }
    }
    while profile.score(hi).0 < 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > MAX_ITER || !hi.is_finite() {
            return Err(Error::Convergence {
                solver: "weibull shape bracket",
                iterations: guard,
                last_iterate: hi,
            });
        }
    }

    let mut converged = false;
    for _ in 0..MAX_ITER {
        let (g, dg) = profile.score(k);
        if g == 0.0 {
            converged = true;
            break;
        }
        if g < 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let mut next = k - g / dg;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - k).abs();
        k = next;
        if step <= 1e-13 * k || hi - lo <= 1e-14 * k {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            solver: "weibull shape Newton",
            iterations: MAX_ITER,
            last_iterate: k,
        });
    }
    let (ln_s0, _, _) = profile.sums(k);
    let scale = c * ((ln_s0 - total_w.ln()) / k).exp();
    WeibullParams::new(k, scale)
}
