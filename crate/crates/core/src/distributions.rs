//! Per-family distribution kernels: Gamma, Gaussian and Weibull.
//!
//! Parameter structs validate on construction, so evaluation never fails.
//! Gamma and Weibull densities are supported on the open interval (0, ∞):
//! their pdf is 0 for `x <= 0`, including `x = 0` with shape < 1 where the
//! true density diverges.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::special::{self, LN_SQRT_2PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gamma,
    Gaussian,
    Weibull,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Gamma, Family::Gaussian, Family::Weibull];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Gamma => "gamma",
            Family::Gaussian => "gaussian",
            Family::Weibull => "weibull",
        }
    }

    /// Whether the family only has mass on (0, ∞).
    pub fn positive_support(self) -> bool {
        !matches!(self, Family::Gaussian)
    }

    /// Names of the two parameters, in `(p1, p2)` order.
    pub fn param_names(self) -> (&'static str, &'static str) {
        match self {
            Family::Gamma | Family::Weibull => ("shape", "scale"),
            Family::Gaussian => ("mean", "std"),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gamma" => Ok(Family::Gamma),
            "gaussian" | "normal" => Ok(Family::Gaussian),
            "weibull" => Ok(Family::Weibull),
            other => Err(Error::domain(format!("unknown family '{other}'"))),
        }
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}

fn positive_finite(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

/// Gamma(shape α, scale β).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    shape: f64,
    scale: f64,
}

impl GammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        require(positive_finite(shape) && positive_finite(scale), || {
            format!("gamma requires shape > 0 and scale > 0, got ({shape}, {scale})")
        })?;
        Ok(Self { shape, scale })
    }

    /// Moment-matched parameters: α = mean²/var, β = var/mean.
    pub fn from_moments(mean: f64, variance: f64) -> Result<Self> {
        require(mean > 0.0 && variance > 0.0, || {
            format!("gamma moment fit requires mean > 0 and variance > 0, got ({mean}, {variance})")
        })?;
        Self::new(mean * mean / variance, variance / mean)
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// Normal(mean μ, standard deviation σ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    mean: f64,
    std: f64,
}

impl GaussianParams {
    pub fn new(mean: f64, std: f64) -> Result<Self> {
        require(mean.is_finite() && positive_finite(std), || {
            format!("gaussian requires finite mean and std > 0, got ({mean}, {std})")
        })?;
        Ok(Self { mean, std })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std(&self) -> f64 {
        self.std
    }
}

/// Weibull(shape k, scale λ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullParams {
    shape: f64,
    scale: f64,
}

impl WeibullParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        require(positive_finite(shape) && positive_finite(scale), || {
            format!("weibull requires shape > 0 and scale > 0, got ({shape}, {scale})")
        })?;
        Ok(Self { shape, scale })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// Evaluation kernels shared by every family.
pub trait Density {
    fn ln_pdf(&self, x: f64) -> f64;

    fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    fn cdf(&self, x: f64) -> f64;

    /// `(mean, variance)`.
    fn moments(&self) -> (f64, f64);

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
}

impl Density for GammaParams {
    fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 || x.is_nan() {
            return f64::NEG_INFINITY;
        }
        if x.is_infinite() {
            return f64::NEG_INFINITY;
        }
        (self.shape - 1.0) * x.ln()
            - x / self.scale
            - self.shape * self.scale.ln()
            - special::ln_gamma_unchecked(self.shape)
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            special::reg_lower_inc_gamma_unchecked(self.shape, x / self.scale)
        }
    }

    fn moments(&self) -> (f64, f64) {
        (self.shape * self.scale, self.shape * self.scale * self.scale)
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // parameters are already validated
        rand_distr::Gamma::new(self.shape, self.scale)
            .expect("validated gamma parameters")
            .sample(rng)
    }
}

impl Density for GaussianParams {
    fn ln_pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.std;
        -0.5 * z * z - self.std.ln() - LN_SQRT_2PI
    }

    fn cdf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        special::std_normal_cdf((x - self.mean) / self.std)
    }

    fn moments(&self) -> (f64, f64) {
        (self.mean, self.std * self.std)
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rand_distr::Normal::new(self.mean, self.std)
            .expect("validated gaussian parameters")
            .sample(rng)
    }
}

impl Density for WeibullParams {
    fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 || x.is_nan() || x.is_infinite() {
            return f64::NEG_INFINITY;
        }
        let ln_ratio = x.ln() - self.scale.ln();
        self.shape.ln() - self.scale.ln() + (self.shape - 1.0) * ln_ratio - (self.shape * ln_ratio).exp()
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-(x / self.scale).powf(self.shape)).exp_m1()
        }
    }

    fn moments(&self) -> (f64, f64) {
        let g1 = special::ln_gamma_unchecked(1.0 + 1.0 / self.shape).exp();
        let g2 = special::ln_gamma_unchecked(1.0 + 2.0 / self.shape).exp();
        let mean = self.scale * g1;
        let var = self.scale * self.scale * (g2 - g1 * g1);
        (mean, var.max(0.0))
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rand_distr::Weibull::new(self.scale, self.shape)
            .expect("validated weibull parameters")
            .sample(rng)
    }
}

/// Family-tagged component parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComponentParams {
    Gamma(GammaParams),
    Gaussian(GaussianParams),
    Weibull(WeibullParams),
}

impl ComponentParams {
    /// Builds parameters from the generic `(p1, p2)` pair:
    /// (shape, scale) for Gamma and Weibull, (mean, std) for Gaussian.
    pub fn new(family: Family, p1: f64, p2: f64) -> Result<Self> {
        Ok(match family {
            Family::Gamma => ComponentParams::Gamma(GammaParams::new(p1, p2)?),
            Family::Gaussian => ComponentParams::Gaussian(GaussianParams::new(p1, p2)?),
            Family::Weibull => ComponentParams::Weibull(WeibullParams::new(p1, p2)?),
        })
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Gamma, shape, scale)
    }

    pub fn gaussian(mean: f64, std: f64) -> Result<Self> {
        Self::new(Family::Gaussian, mean, std)
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Weibull, shape, scale)
    }

    pub fn family(&self) -> Family {
        match self {
            ComponentParams::Gamma(_) => Family::Gamma,
            ComponentParams::Gaussian(_) => Family::Gaussian,
            ComponentParams::Weibull(_) => Family::Weibull,
        }
    }

    pub fn p1(&self) -> f64 {
        match self {
            ComponentParams::Gamma(p) => p.shape,
            ComponentParams::Gaussian(p) => p.mean,
            ComponentParams::Weibull(p) => p.shape,
        }
    }

    pub fn p2(&self) -> f64 {
        match self {
            ComponentParams::Gamma(p) => p.scale,
            ComponentParams::Gaussian(p) => p.std,
            ComponentParams::Weibull(p) => p.scale,
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $p:ident => $e:expr) => {
        match $self {
            ComponentParams::Gamma($p) => $e,
            ComponentParams::Gaussian($p) => $e,
            ComponentParams::Weibull($p) => $e,
        }
    };
}

impl Density for ComponentParams {
    fn ln_pdf(&self, x: f64) -> f64 {
        dispatch!(self, p => p.ln_pdf(x))
    }

    fn pdf(&self, x: f64) -> f64 {
        dispatch!(self, p => p.pdf(x))
    }

    fn cdf(&self, x: f64) -> f64 {
        dispatch!(self, p => p.cdf(x))
    }

    fn moments(&self) -> (f64, f64) {
        dispatch!(self, p => p.moments())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        dispatch!(self, p => p.draw(rng))
    }
}

impl From<GammaParams> for ComponentParams {
    fn from(p: GammaParams) -> Self {
        ComponentParams::Gamma(p)
    }
}

impl From<GaussianParams> for ComponentParams {
    fn from(p: GaussianParams) -> Self {
        ComponentParams::Gaussian(p)
    }
}

impl From<WeibullParams> for ComponentParams {
    fn from(p: WeibullParams) -> Self {
        ComponentParams::Weibull(p)
    }
}

pub fn pdf(params: &ComponentParams, x: f64) -> f64 {
    params.pdf(x)
}

pub fn ln_pdf(params: &ComponentParams, x: f64) -> f64 {
    params.ln_pdf(x)
}

pub fn cdf(params: &ComponentParams, x: f64) -> f64 {
    params.cdf(x)
}

pub fn moments(params: &ComponentParams) -> (f64, f64) {
    params.moments()
}

/// Draws `n` values from one distribution using a generator seeded by `seed`.
pub fn sample(params: &ComponentParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyResult("sample requires n >= 1".into()));
    }
    let mut rng = rng::seeded(seed);
    Ok((0..n).map(|_| params.draw(&mut rng)).collect())
}
