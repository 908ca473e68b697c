use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A scalar field with optionally declared derivative fields.
///
/// Declared derivatives are candidates (for `D_v^α f` or `∂^α f`); nothing
/// here checks them.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    value: Evaluator,
    derivatives: BTreeMap<MultiIndex, Evaluator>,
    singular_points: Vec<Vec<f64>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim)
            .field("derivatives", &self.derivatives.keys().collect::<Vec<_>>())
            .field("singular_points", &self.singular_points)
            .finish()
    }
}

impl ScalarField {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField { dim, value: Arc::new(f), derivatives: BTreeMap::new(), singular_points: vec![] }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut s = Self::new(dim, move |_| c);
        for a in MultiIndex::all_up_to(dim, 4).into_iter().filter(|a| !a.is_zero()) {
            s = s.with_derivative(a, |_| 0.0);
        }
        s
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, 0.0)
    }

    /// One-dimensional field from a function of `t`.
    pub fn univariate(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(1, move |x| f(x[0]))
    }

    pub fn with_derivative(mut self, alpha: MultiIndex, g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.derivatives.insert(alpha, Arc::new(g));
        self
    }

    /// Declare `f'` for a one-dimensional field.
    pub fn with_univariate_derivative(self, k: usize, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.with_derivative(MultiIndex::new(vec![k]), move |x| g(x[0]))
    }

    pub fn with_singular_point(mut self, x: Vec<f64>) -> Self {
        self.singular_points.push(x);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn singular_points(&self) -> &[Vec<f64>] {
        &self.singular_points
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn has_derivative(&self, alpha: &MultiIndex) -> bool {
        alpha.is_zero() || self.derivatives.contains_key(alpha)
    }

    /// The declared derivative field `α`; `α = 0` is the field itself.
    pub fn derivative(&self, alpha: &MultiIndex) -> Result<Evaluator> {
        if alpha.is_zero() {
            return Ok(self.value.clone());
        }
        self.derivatives.get(alpha).cloned().ok_or_else(|| Error::invalid(format!("no declared derivative for α = {alpha}")))
    }

    pub fn eval_derivative(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
        Ok(self.derivative(alpha)?(x))
    }

    /// `c·f` with every declared derivative scaled.
    pub fn scaled(&self, c: f64) -> Self {
        let v = self.value.clone();
        let mut out = ScalarField::new(self.dim, move |x| c * v(x));
        for (a, g) in &self.derivatives {
            let g = g.clone();
            out.derivatives.insert(a.clone(), Arc::new(move |x: &[f64]| c * g(x)));
        }
        out.singular_points = self.singular_points.clone();
        out
    }

    /// `f + g` on the derivatives both declare.
    pub fn sum(&self, other: &ScalarField) -> Self {
        let (a, b) = (self.value.clone(), other.value.clone());
        let mut out = ScalarField::new(self.dim, move |x| a(x) + b(x));
        for (alpha, g) in &self.derivatives {
            if let Some(h) = other.derivatives.get(alpha) {
                let (g, h) = (g.clone(), h.clone());
                out.derivatives.insert(alpha.clone(), Arc::new(move |x: &[f64]| g(x) + h(x)));
            }
        }
        out.singular_points = self.singular_points.iter().chain(&other.singular_points).cloned().collect();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declared_derivatives() {
        let f = ScalarField::univariate(|t| t * t).with_univariate_derivative(1, |t| 2.0 * t);
        assert_eq!(f.eval_derivative(&MultiIndex::new(vec![1]), &[3.0]).unwrap(), 6.0);
        assert_eq!(f.eval_derivative(&MultiIndex::new(vec![0]), &[3.0]).unwrap(), 9.0);
        assert!(f.derivative(&MultiIndex::new(vec![2])).is_err());
        let g = f.scaled(-2.0).sum(&f);
        assert_eq!(g.eval_derivative(&MultiIndex::new(vec![1]), &[1.0]).unwrap(), -2.0);
    }
}
