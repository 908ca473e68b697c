use super::{HypothesisKind, HypothesisReport, Witness};
use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub enum ShapeKind {
    /// `s(α) = |α|`.
    Abs,
    /// Explicit values on `π_m`.
    Table(BTreeMap<MultiIndex, f64>),
}

/// The map `s` fixing the weight exponents `w_α = |v|^{s(α)+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeMap {
    kind: ShapeKind,
    dim: usize,
    max_order: usize,
}

impl ShapeMap {
    pub fn abs(dim: usize, max_order: usize) -> Self {
        ShapeMap { kind: ShapeKind::Abs, dim, max_order }
    }

    pub fn table(dim: usize, max_order: usize, values: BTreeMap<MultiIndex, f64>) -> Self {
        ShapeMap { kind: ShapeKind::Table(values), dim, max_order }
    }

    /// Tabulate `f` over `π_m`.
    pub fn from_fn(dim: usize, max_order: usize, f: impl Fn(&MultiIndex) -> f64) -> Self {
        let values = MultiIndex::all_up_to(dim, max_order).into_iter().map(|a| {
            let s = f(&a);
            (a, s)
        });
        Self::table(dim, max_order, values.collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn kind(&self) -> &ShapeKind {
        &self.kind
    }

    pub fn value(&self, alpha: &MultiIndex) -> Result<f64> {
        match &self.kind {
            ShapeKind::Abs => Ok(alpha.order() as f64),
            ShapeKind::Table(t) => {
                t.get(alpha).copied().ok_or_else(|| Error::invalid(format!("shape map undefined at α = {alpha}")))
            }
        }
    }
}

/// Certify `s(α) ≤ |α|` and `s(α−β) + s(β) ≤ s(α)` for every `β ≤ α ∈ π_m`
/// by exhaustive enumeration.
pub fn validate_shape_map(s: &ShapeMap, m: i64) -> Result<HypothesisReport> {
    if m < 0 {
        return Err(Error::invalid(format!("order m must be non-negative, got {m}")));
    }
    let m = m as usize;
    let indices = MultiIndex::all_up_to(s.dim(), m);
    let values: BTreeMap<&MultiIndex, f64> = indices.iter().map(|a| s.value(a).map(|v| (a, v))).collect::<Result<_>>()?;

    let mut details = Vec::new();
    let mut witness = None;
    const TOL: f64 = 1e-12;

    for alpha in &indices {
        let sa = values[alpha];
        for beta in alpha.lower_set() {
            let lhs = values[&alpha.sub(&beta)] + values[&beta];
            if lhs > sa + TOL {
                details.push(format!("superadditivity fails: s({}) + s({beta}) = {lhs} > s({alpha}) = {sa}", alpha.sub(&beta)));
                witness.get_or_insert_with(|| Witness {
                    point: vec![],
                    value: lhs - sa,
                    label: format!("alpha={alpha} beta={beta}"),
                });
            }
        }
    }
    for alpha in &indices {
        let sa = values[alpha];
        if sa > alpha.order() as f64 + TOL || sa < -TOL {
            details.push(format!("order bound fails: s({alpha}) = {sa} outside [0, {}]", alpha.order()));
            witness.get_or_insert_with(|| Witness {
                point: vec![],
                value: sa - alpha.order() as f64,
                label: format!("alpha={alpha}"),
            });
        }
    }
    Ok(HypothesisReport { kind: HypothesisKind::ShapeMap, holds: witness.is_none(), witness, constant: None, details })
}
