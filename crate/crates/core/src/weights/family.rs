use super::{ShapeMap, WeightFunction};
use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// `w_α = |v|^{s(α)+1}`.
    ShapePower,
    Independent(WeightFunction),
}

/// The family `V = {w_α}_{α ∈ π_m}` together with the differentiating weight `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFamily {
    base: WeightFunction,
    shape: ShapeMap,
    p: f64,
    m: usize,
    entries: BTreeMap<MultiIndex, WeightSpec>,
}

impl WeightFamily {
    pub fn from_shape(base: WeightFunction, shape: ShapeMap, m: usize, p: f64) -> Result<Self> {
        if shape.dim() != base.dim() {
            return Err(Error::invalid("shape map and weight dimensions differ"));
        }
        if !(p >= 1.0) {
            return Err(Error::invalid(format!("norm order p must be >= 1, got {p}")));
        }
        let entries = MultiIndex::all_up_to(base.dim(), m).into_iter().map(|a| (a, WeightSpec::ShapePower)).collect();
        Ok(WeightFamily { base, shape, p, m, entries })
    }

    pub fn with_entry(mut self, alpha: MultiIndex, spec: WeightSpec) -> Result<Self> {
        if !self.entries.contains_key(&alpha) {
            return Err(Error::invalid(format!("α = {alpha} is outside π_m")));
        }
        self.entries.insert(alpha, spec);
        Ok(self)
    }

    pub fn base(&self) -> &WeightFunction {
        &self.base
    }

    pub fn shape(&self) -> &ShapeMap {
        &self.shape
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn max_order(&self) -> usize {
        self.m
    }

    pub fn indices(&self) -> impl Iterator<Item = &MultiIndex> {
        self.entries.keys()
    }

    /// `|w_α(x)|`.
    pub fn weight(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
        match self.entries.get(alpha) {
            Some(WeightSpec::ShapePower) => Ok(self.base.value(x).abs().powf(self.shape.value(alpha)? + 1.0)),
            Some(WeightSpec::Independent(w)) => Ok(w.value(x).abs()),
            None => Err(Error::invalid(format!("no weight for α = {alpha}"))),
        }
    }

    /// The `w_0` entry, written `w`.
    pub fn w(&self, x: &[f64]) -> f64 {
        self.weight(&MultiIndex::zero(self.base.dim()), x).unwrap_or(f64::NAN)
    }
}
