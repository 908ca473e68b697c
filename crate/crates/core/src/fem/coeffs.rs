use crate::calculus::Evaluator;
use crate::error::{Error, Result};
use crate::geometry::norm2;
use crate::weights::{WeightFunction, WeightKind};
use std::fmt;
use std::sync::Arc;

pub type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A scalar coefficient field.
#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    /// `scale·|x|^exponent`.
    RadialPower {
        scale: f64,
        exponent: f64,
    },
    /// General field with an optional gradient.
    Function {
        f: Evaluator,
        gradient: Option<GradientFn>,
    },
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::RadialPower { scale, exponent } => write!(f, "RadialPower({scale}·|x|^{exponent})"),
            Coefficient::Function { gradient, .. } => write!(f, "Function(gradient: {})", gradient.is_some()),
        }
    }
}

impl Coefficient {
    pub fn function(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Coefficient::Function { f: Arc::new(f), gradient: None }
    }

    pub fn with_gradient(self, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        match self {
            Coefficient::Function { f, .. } => Coefficient::Function { f, gradient: Some(Arc::new(g)) },
            other => other,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::RadialPower { scale, exponent } => {
                if *scale == 0.0 {
                    0.0
                } else {
                    scale * norm2(x).powf(*exponent)
                }
            }
            Coefficient::Function { f, .. } => f(x),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self {
            Coefficient::Constant(_) => Some(vec![0.0; x.len()]),
            Coefficient::RadialPower { scale, exponent } => {
                if *scale == 0.0 || *exponent == 0.0 {
                    return Some(vec![0.0; x.len()]);
                }
                let r = norm2(x);
                let g = scale * exponent * r.powf(exponent - 2.0);
                Some(x.iter().map(|xi| g * xi).collect())
            }
            Coefficient::Function { gradient, .. } => gradient.as_ref().map(|g| g(x)),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Constant(c) if *c == 0.0)
            || matches!(self, Coefficient::RadialPower { scale, .. } if *scale == 0.0)
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Coefficient::Constant(c) => Some(*c),
            Coefficient::RadialPower { scale, exponent } if *scale == 0.0 || *exponent == 0.0 => Some(*scale),
            _ => None,
        }
    }

    /// `(scale, exponent)` for constants and radial powers.
    pub fn radial_form(&self) -> Option<(f64, f64)> {
        match self {
            Coefficient::Constant(c) => Some((*c, 0.0)),
            Coefficient::RadialPower { scale, exponent } => Some((*scale, *exponent)),
            Coefficient::Function { .. } => None,
        }
    }
}

/// Coefficients of `−div(a∇f) + b·∇f + cf = k` in the scaled form
/// `a = v⁴ã`, `b = v³b̃`, `c = v²c̃`.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub a_tilde: Vec<Vec<Coefficient>>,
    pub b_tilde: Vec<Coefficient>,
    pub c_tilde: Coefficient,
    pub k: Coefficient,
    pub v: WeightFunction,
}

impl CoefficientSet {
    /// `ã = a·I`, `b̃ = 0`, `c̃ = c`.
    pub fn isotropic(dim: usize, a: f64, c: f64, k: Coefficient, v: WeightFunction) -> Self {
        let a_tilde = (0..dim).map(|i| (0..dim).map(|j| Coefficient::Constant(if i == j { a } else { 0.0 })).collect()).collect();
        CoefficientSet { a_tilde, b_tilde: vec![Coefficient::Constant(0.0); dim], c_tilde: Coefficient::Constant(c), k, v }
    }

    /// The boundary-value problem `−Σ D_i(|x|^{8m} D_i f) + |x|^{4m} f = |x|^{2m−β}`
    /// in `d` dimensions, i.e. `v = |x|^{2m}`, `ã = I`, `c̃ = 1`, `k = |x|^{2m−β}`.
    pub fn power_example(dim: usize, m: u32, beta: f64) -> Self {
        let v = WeightFunction::radial_power(2.0 * m as f64, dim, 4);
        let k = Coefficient::RadialPower { scale: 1.0, exponent: 2.0 * m as f64 - beta };
        Self::isotropic(dim, 1.0, 1.0, k, v)
    }

    pub fn dim(&self) -> usize {
        self.b_tilde.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 || self.a_tilde.len() != d || self.a_tilde.iter().any(|r| r.len() != d) {
            return Err(Error::invalid("ã must be d×d and b̃ must have d entries"));
        }
        if self.v.dim() != d {
            return Err(Error::invalid(format!("weight dimension {} differs from coefficient dimension {d}", self.v.dim())));
        }
        Ok(())
    }

    /// Whether `ã` is symmetric and `b̃ ≡ 0`, so the bilinear form is symmetric.
    pub fn is_symmetric(&self) -> bool {
        let d = self.dim();
        let a_sym = (0..d).all(|i| {
            (0..i).all(|j| {
                let (p, q) = (&self.a_tilde[i][j], &self.a_tilde[j][i]);
                match (p.radial_form(), q.radial_form()) {
                    (Some(x), Some(y)) => x == y || (p.is_zero() && q.is_zero()),
                    _ => false,
                }
            })
        });
        a_sym && self.b_tilde.iter().all(Coefficient::is_zero)
    }

    /// Effective `a_ij(x) = v⁴ã_ij`.
    pub fn a(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let v4 = self.v.value(x).powi(4);
        self.a_tilde.iter().map(|r| r.iter().map(|c| v4 * c.value(x)).collect()).collect()
    }

    /// Effective `b_i(x) = v³b̃_i`.
    pub fn b(&self, x: &[f64]) -> Vec<f64> {
        let v3 = self.v.value(x).powi(3);
        self.b_tilde.iter().map(|c| v3 * c.value(x)).collect()
    }

    /// Effective `c(x) = v²c̃`.
    pub fn c(&self, x: &[f64]) -> f64 {
        self.v.value(x).powi(2) * self.c_tilde.value(x)
    }

    /// `div b = Σ 3v²∂_i v b̃_i + v³∂_i b̃_i`, when every `b̃_i` has a gradient.
    pub fn div_b(&self, x: &[f64]) -> Option<f64> {
        let v = self.v.value(x);
        let gv = self.v.gradient(x);
        let mut s = 0.0;
        for (i, bt) in self.b_tilde.iter().enumerate() {
            if bt.is_zero() {
                continue;
            }
            let g = bt.gradient(x)?;
            s += 3.0 * v * v * gv[i] * bt.value(x) + v.powi(3) * g[i];
        }
        Some(s)
    }

    /// Whether the weight is a radial power (or `v ≡ 1`), with its exponent.
    pub(crate) fn weight_exponent(&self) -> Option<f64> {
        match self.v.kind() {
            WeightKind::RadialPower { exponent } => Some(*exponent),
            WeightKind::One => Some(0.0),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_coefficients_scale_with_v() {
        let s = CoefficientSet::power_example(2, 1, 0.5);
        let x = [0.3, 0.4];
        assert!((s.a(&x)[0][0] - 0.5f64.powi(8)).abs() < 1e-15);
        assert_eq!(s.a(&x)[0][1], 0.0);
        assert!((s.c(&x) - 0.5f64.powi(4)).abs() < 1e-15);
        assert!((s.k.value(&x) - 0.5f64.powf(1.5)).abs() < 1e-15);
        assert!(s.is_symmetric());
        assert_eq!(s.div_b(&x), Some(0.0));
    }

    #[test]
    fn radial_gradient_matches_difference() {
        let c = Coefficient::RadialPower { scale: 2.0, exponent: 1.5 };
        let x = [0.3, -0.2];
        let g = c.gradient(&x).unwrap();
        let h = 1e-6;
        let fd = (c.value(&[0.3 + h, -0.2]) - c.value(&[0.3 - h, -0.2])) / (2.0 * h);
        assert!((g[0] - fd).abs() < 1e-7);
    }
}
