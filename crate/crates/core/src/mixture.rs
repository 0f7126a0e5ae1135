//! Finite mixtures of same-family components.
//!
//! A [`MixtureModel`] is immutable once built. Construction checks that every
//! component shares one family and that the weights sum to one within
//! [`WEIGHT_SUM_TOL`], then stores components in canonical order: descending
//! weight, ties broken by ascending `(p1, p2)`.

use std::cmp::Ordering;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::distributions::{ComponentParams, Density, Family};
use crate::error::{Error, Result};
use crate::rng;

pub const WEIGHT_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub params: ComponentParams,
}

impl Component {
    pub fn new(weight: f64, params: impl Into<ComponentParams>) -> Self {
        Self {
            weight,
            params: params.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelDoc", into = "ModelDoc")]
pub struct MixtureModel {
    family: Family,
    components: Vec<Component>,
}

fn canonical_order(a: &Component, b: &Component) -> Ordering {
    b.weight
        .total_cmp(&a.weight)
        .then(a.params.p1().total_cmp(&b.params.p1()))
        .then(a.params.p2().total_cmp(&b.params.p2()))
}

impl MixtureModel {
    pub fn new(mut components: Vec<Component>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::domain("a mixture needs at least one component"))?;
        let family = first.params.family();
        if let Some(other) = components.iter().find(|c| c.params.family() != family) {
            return Err(Error::domain(format!(
                "mixed-family mixture: {} and {}",
                family,
                other.params.family()
            )));
        }
        let m = components.len();
        for (k, c) in components.iter().enumerate() {
            let ok = c.weight.is_finite() && c.weight > 0.0 && c.weight <= 1.0 + WEIGHT_SUM_TOL;
            if !ok || (m > 1 && c.weight >= 1.0) {
                return Err(Error::domain(format!("component {k} has invalid weight {}", c.weight)));
            }
        }
        let sum: f64 = components.iter().map(|c| c.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::domain(format!("mixture weights sum to {sum}, expected 1")));
        }
        // leave sums that are already 1 up to rounding untouched so that
        // serialized models reload bit-exactly
        if (sum - 1.0).abs() > 4.0 * f64::EPSILON * m as f64 {
            for c in &mut components {
                c.weight /= sum;
            }
        }
        components.sort_by(canonical_order);
        Ok(Self { family, components })
    }

    pub fn single(params: impl Into<ComponentParams>) -> Self {
        let params = params.into();
        Self {
            family: params.family(),
            components: vec![Component { weight: 1.0, params }],
        }
    }

    /// Builds a model from `(weight, p1, p2)` triples of one family.
    pub fn from_triples(family: Family, triples: &[(f64, f64, f64)]) -> Result<Self> {
        let components = triples
            .iter()
            .map(|&(w, p1, p2)| Ok(Component::new(w, ComponentParams::new(family, p1, p2)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(components)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight).collect()
    }

    /// Free parameter count: m − 1 weights plus two per component.
    pub fn n_free_params(&self) -> usize {
        3 * self.components.len() - 1
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.weight * c.params.pdf(x)).sum()
    }

    pub fn pdf_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.pdf(x)).collect()
    }

    /// Log density by log-sum-exp over components.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let term = |c: &Component| c.weight.ln() + c.params.ln_pdf(x);
        let max = self.components.iter().map(term).fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return max;
        }
        max + self.components.iter().map(|c| (term(c) - max).exp()).sum::<f64>().ln()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let total: f64 = self.components.iter().map(|c| c.weight * c.params.cdf(x)).sum();
        total.clamp(0.0, 1.0)
    }

    /// `(mean, variance)` of the mixture.
    pub fn moments(&self) -> (f64, f64) {
        let mut mean = 0.0;
        let mut second = 0.0;
        for c in &self.components {
            let (m, v) = c.params.moments();
            mean += c.weight * m;
            second += c.weight * (v + m * m);
        }
        (mean, (second - mean * mean).max(0.0))
    }

    pub fn log_likelihood(&self, samples: &[f64]) -> f64 {
        samples.iter().map(|&x| self.ln_pdf(x)).sum()
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        Ok(self.sample_labeled(n, seed)?.into_iter().map(|(x, _)| x).collect())
    }

    /// Draws `n` values, each paired with the index of the component that
    /// generated it.
    pub fn sample_labeled(&self, n: usize, seed: u64) -> Result<Vec<(f64, usize)>> {
        if n == 0 {
            return Err(Error::EmptyResult("mixture sample requires n >= 1".into()));
        }
        let mut rng = rng::seeded(seed);
        let picker = WeightedIndex::new(self.components.iter().map(|c| c.weight))
            .map_err(|e| Error::domain(format!("invalid mixture weights: {e}")))?;
        Ok((0..n)
            .map(|_| {
                let k = picker.sample(&mut rng);
                (self.components[k].params.draw(&mut rng), k)
            })
            .collect())
    }
}

pub fn mixture_pdf(model: &MixtureModel, x: f64) -> f64 {
    model.pdf(x)
}

pub fn mixture_cdf(model: &MixtureModel, x: f64) -> f64 {
    model.cdf(x)
}

pub fn mixture_sample(model: &MixtureModel, n: usize, seed: u64) -> Result<Vec<f64>> {
    model.sample(n, seed)
}

pub fn mixture_moments(model: &MixtureModel) -> (f64, f64) {
    model.moments()
}

/// On-disk shape of a model: `{family, components: [{weight, p1, p2}]}`.
/// Reading also accepts the named forms `shape`/`scale` and `mean`/`std`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub family: Family,
    pub components: Vec<ComponentDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    pub weight: f64,
    #[serde(alias = "shape", alias = "mean")]
    pub p1: f64,
    #[serde(alias = "scale", alias = "std")]
    pub p2: f64,
}

impl From<MixtureModel> for ModelDoc {
    fn from(model: MixtureModel) -> Self {
        ModelDoc {
            family: model.family,
            components: model
                .components
                .iter()
                .map(|c| ComponentDoc {
                    weight: c.weight,
                    p1: c.params.p1(),
                    p2: c.params.p2(),
                })
                .collect(),
        }
    }
}

impl TryFrom<ModelDoc> for MixtureModel {
    type Error = Error;

    fn try_from(doc: ModelDoc) -> Result<Self> {
        let triples: Vec<_> = doc.components.iter().map(|c| (c.weight, c.p1, c.p2)).collect();
        MixtureModel::from_triples(doc.family, &triples)
    }
}
