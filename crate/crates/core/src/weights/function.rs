use crate::cutoff::compose_partial;
use crate::error::{Error, Result};
use crate::geometry::{norm2, Domain};
use crate::multi_index::MultiIndex;

/// Declared zero set of a weight. Zeros are part of the weight's definition
/// rather than something discovered numerically.
#[derive(Debug, Clone, PartialEq)]
pub enum ZeroSet {
    Empty,
    Origin,
    Points(Vec<Vec<f64>>),
}

impl ZeroSet {
    pub fn points(&self, dim: usize) -> Vec<Vec<f64>> {
        match self {
            ZeroSet::Empty => vec![],
            ZeroSet::Origin => vec![vec![0.0; dim]],
            ZeroSet::Points(p) => p.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ZeroSet::Empty) || matches!(self, ZeroSet::Points(p) if p.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `|x|^β`.
    RadialPower { exponent: f64 },
    /// `v ≡ 1`.
    One,
    /// `a + b·sin(c·x₁)`.
    AffineTrig { offset: f64, amplitude: f64, frequency: f64 },
    /// `Σ_k c_k x₁^k`.
    Polynomial { coefficients: Vec<f64> },
    /// Natural cubic spline through samples of `x₁ ↦ v`.
    GridSampled(CubicSpline),
}

/// A weight `v ∈ 𝒞^{m,*}(Ω)`: `m` times continuously differentiable and
/// nonzero away from its declared zero set.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    kind: WeightKind,
    dim: usize,
    order: usize,
    zero_set: ZeroSet,
}

impl WeightFunction {
    pub fn radial_power(exponent: f64, dim: usize, order: usize) -> Self {
        let zero_set = if exponent > 0.0 { ZeroSet::Origin } else { ZeroSet::Empty };
        WeightFunction { kind: WeightKind::RadialPower { exponent }, dim, order, zero_set }
    }

    pub fn one(dim: usize) -> Self {
        WeightFunction { kind: WeightKind::One, dim, order: usize::MAX, zero_set: ZeroSet::Empty }
    }

    /// `a + b sin(c x)`. When `|a| ≤ |b|` the weight has zeros which must be
    /// declared with [`WeightFunction::with_zero_set`].
    pub fn affine_trig(offset: f64, amplitude: f64, frequency: f64, order: usize) -> Self {
        WeightFunction { kind: WeightKind::AffineTrig { offset, amplitude, frequency }, dim: 1, order, zero_set: ZeroSet::Empty }
    }

    pub fn polynomial(coefficients: Vec<f64>, zeros: Vec<f64>, order: usize) -> Self {
        let zero_set =
            if zeros.is_empty() { ZeroSet::Empty } else { ZeroSet::Points(zeros.into_iter().map(|z| vec![z]).collect()) };
        WeightFunction { kind: WeightKind::Polynomial { coefficients }, dim: 1, order, zero_set }
    }

    /// `v(x) = x` on the line, vanishing at the origin.
    pub fn identity(order: usize) -> Self {
        Self::polynomial(vec![0.0, 1.0], vec![0.0], order)
    }

    pub fn grid_sampled(xs: Vec<f64>, ys: Vec<f64>, zeros: Vec<f64>) -> Result<Self> {
        let spline = CubicSpline::natural(xs, ys)?;
        let zero_set =
            if zeros.is_empty() { ZeroSet::Empty } else { ZeroSet::Points(zeros.into_iter().map(|z| vec![z]).collect()) };
        Ok(WeightFunction { kind: WeightKind::GridSampled(spline), dim: 1, order: 2, zero_set })
    }

    pub fn with_zero_set(mut self, zero_set: ZeroSet) -> Self {
        self.zero_set = zero_set;
        self
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Highest derivative order the weight is declared for.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn zero_set(&self) -> &ZeroSet {
        &self.zero_set
    }

    pub fn zero_points(&self) -> Vec<Vec<f64>> {
        self.zero_set.points(self.dim)
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.kind, WeightKind::RadialPower { .. } | WeightKind::One)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            WeightKind::RadialPower { exponent } => norm2(x).powf(*exponent),
            WeightKind::One => 1.0,
            _ => self.axis_derivative(x[0], 0),
        }
    }

    /// `∂^α v(x)`.
    pub fn partial(&self, x: &[f64], alpha: &MultiIndex) -> Result<f64> {
        if alpha.dim() != self.dim || x.len() != self.dim {
            return Err(Error::invalid(format!(
                "dimension mismatch: weight has d = {}, got α of length {} and x of length {}",
                self.dim,
                alpha.dim(),
                x.len()
            )));
        }
        if alpha.order() > self.order {
            return Err(Error::invalid(format!("derivative order {} exceeds the weight's order {}", alpha.order(), self.order)));
        }
        Ok(self.partial_positions(x, &alpha.positions()))
    }

    /// Partial derivative along a multiset of coordinate indices; no order checks.
    pub(crate) fn partial_positions(&self, x: &[f64], block: &[usize]) -> f64 {
        if block.is_empty() {
            return self.value(x);
        }
        match &self.kind {
            WeightKind::One => 0.0,
            WeightKind::RadialPower { exponent } => {
                let u: f64 = x.iter().map(|c| c * c).sum();
                let half = exponent / 2.0;
                let n = block.len();
                let mut outer = [0.0; 8];
                let mut falling = 1.0;
                for (k, o) in outer.iter_mut().enumerate().take(n + 1) {
                    *o = falling * u.powf(half - k as f64);
                    falling *= half - k as f64;
                }
                let alpha = positions_to_index(block, self.dim);
                compose_partial(&outer, &alpha, |b| match b {
                    [i] => 2.0 * x[*i],
                    [i, j] if i == j => 2.0,
                    _ => 0.0,
                })
            }
            _ => {
                if block.iter().any(|&i| i != 0) {
                    0.0
                } else {
                    self.axis_derivative(x[0], block.len())
                }
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| self.partial_positions(x, &[i])).collect()
    }

    /// Radial profile `(v(r), v'(r))` for radial kinds.
    pub fn radial_profile(&self, r: f64) -> Option<(f64, f64)> {
        match self.kind {
            WeightKind::RadialPower { exponent } => Some((r.powf(exponent), exponent * r.powf(exponent - 1.0))),
            WeightKind::One => Some((1.0, 0.0)),
            _ => None,
        }
    }

    /// Whether `v` and `∇v` are bounded on the domain (`v ∈ 𝒞_b¹`), decided
    /// from the weight kind.
    pub fn is_c1_bounded(&self, domain: &Domain) -> bool {
        match &self.kind {
            WeightKind::RadialPower { exponent } => {
                let origin_in_closure = domain.closure_contains(&vec![0.0; domain.dim()]);
                !origin_in_closure || *exponent == 0.0 || *exponent >= 1.0
            }
            _ => true,
        }
    }

    /// k-th derivative of the one-dimensional kinds along `x₁`.
    fn axis_derivative(&self, t: f64, k: usize) -> f64 {
        match &self.kind {
            WeightKind::AffineTrig { offset, amplitude, frequency } => {
                let base = amplitude * frequency.powi(k as i32) * (frequency * t + k as f64 * std::f64::consts::FRAC_PI_2).sin();
                if k == 0 {
                    offset + base
                } else {
                    base
                }
            }
            WeightKind::Polynomial { coefficients } => horner_derivative(coefficients, k, t),
            WeightKind::GridSampled(s) => s.derivative(t, k),
            WeightKind::One => {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            WeightKind::RadialPower { .. } => unreachable!("radial weights are evaluated in d dimensions"),
        }
    }
}

fn horner_derivative(coefficients: &[f64], k: usize, t: f64) -> f64 {
    if coefficients.len() <= k {
        return 0.0;
    }
    let mut acc = 0.0;
    for j in (k..coefficients.len()).rev() {
        let falling: f64 = ((j - k + 1)..=j).map(|i| i as f64).product();
        acc = acc * t + coefficients[j] * falling;
    }
    acc
}

fn positions_to_index(block: &[usize], dim: usize) -> MultiIndex {
    let mut c = vec![0; dim];
    block.iter().for_each(|&i| c[i] += 1);
    MultiIndex::new(c)
}

/// Natural cubic spline interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 3 || ys.len() != n {
            return Err(Error::invalid("spline needs at least 3 samples and matching lengths"));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("spline abscissae must be strictly increasing"));
        }
        // Tridiagonal system for interior second derivatives (Thomas algorithm).
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let mut m = vec![0.0; n];
        let k = n - 2;
        let mut diag = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        let mut sup = vec![0.0; k];
        for i in 0..k {
            diag[i] = 2.0 * (h[i] + h[i + 1]);
            sup[i] = h[i + 1];
            rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h[i + 1] - (ys[i + 1] - ys[i]) / h[i]);
        }
        for i in 1..k {
            let w = h[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for i in (0..k).rev() {
            let next = if i + 1 < k { m[i + 2] } else { 0.0 };
            m[i + 1] = (rhs[i] - sup[i] * next) / diag[i];
        }
        Ok(CubicSpline { xs, ys, m })
    }

    pub fn derivative(&self, t: f64, k: usize) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.partition_point(|&x| x <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - t) / h;
        let b = (t - self.xs[i]) / h;
        let (m0, m1, y0, y1) = (self.m[i], self.m[i + 1], self.ys[i], self.ys[i + 1]);
        match k {
            0 => a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0,
            1 => (y1 - y0) / h + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0,
            2 => a * m0 + b * m1,
            3 => (m1 - m0) / h,
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mi(c: &[usize]) -> MultiIndex {
        MultiIndex::new(c.to_vec())
    }

    #[test]
    fn radial_power_partials_against_closed_forms() {
        // v = |x|^3 in 2D at (0.3, 0.4), r = 0.5
        let v = WeightFunction::radial_power(3.0, 2, 2);
        let x = [0.3, 0.4];
        assert_relative_eq!(v.value(&x), 0.125, max_relative = 1e-14);
        // ∂₁ v = 3 r x₁
        assert_relative_eq!(v.partial(&x, &mi(&[1, 0])).unwrap(), 3.0 * 0.5 * 0.3, max_relative = 1e-13);
        // ∂₁∂₂ v = 3 x₁ x₂ / r
        assert_relative_eq!(v.partial(&x, &mi(&[1, 1])).unwrap(), 3.0 * 0.3 * 0.4 / 0.5, max_relative = 1e-13);
        // ∂₁² v = 3 (r + x₁²/r)
        assert_relative_eq!(v.partial(&x, &mi(&[2, 0])).unwrap(), 3.0 * (0.5 + 0.09 / 0.5), max_relative = 1e-13);
    }

    #[test]
    fn one_dimensional_square_is_a_polynomial() {
        let v = WeightFunction::radial_power(2.0, 1, 4);
        for &t in &[-0.7, 0.2, 0.9] {
            assert_relative_eq!(v.partial(&[t], &mi(&[1])).unwrap(), 2.0 * t, max_relative = 1e-13);
            assert_relative_eq!(v.partial(&[t], &mi(&[2])).unwrap(), 2.0, max_relative = 1e-13);
            assert!(v.partial(&[t], &mi(&[3])).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn affine_trig_derivatives() {
        let v = WeightFunction::affine_trig(4.0, 1.0, 0.25, 3);
        let t = 0.6;
        assert_relative_eq!(v.value(&[t]), 4.0 + (0.25 * t).sin(), max_relative = 1e-15);
        assert_relative_eq!(v.partial(&[t], &mi(&[1])).unwrap(), 0.25 * (0.25 * t).cos(), max_relative = 1e-14);
        assert_relative_eq!(v.partial(&[t], &mi(&[2])).unwrap(), -0.0625 * (0.25 * t).sin(), max_relative = 1e-13);
    }

    #[test]
    fn polynomial_derivatives() {
        // 1 + 2x + 3x²
        let v = WeightFunction::polynomial(vec![1.0, 2.0, 3.0], vec![], 3);
        assert_relative_eq!(v.value(&[2.0]), 17.0);
        assert_relative_eq!(v.partial(&[2.0], &mi(&[1])).unwrap(), 14.0);
        assert_relative_eq!(v.partial(&[2.0], &mi(&[2])).unwrap(), 6.0);
        assert_eq!(v.partial(&[2.0], &mi(&[3])).unwrap(), 0.0);
    }

    #[test]
    fn order_is_enforced() {
        let v = WeightFunction::identity(1);
        assert!(v.partial(&[0.3], &mi(&[2])).is_err());
    }

    #[test]
    fn spline_reproduces_cubic_interior_and_derivatives() {
        let xs: Vec<f64> = (0..=200).map(|i| -1.0 + i as f64 * 0.01).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (2.0 * x).sin()).collect();
        let v = WeightFunction::grid_sampled(xs, ys, vec![0.0]).unwrap();
        assert_relative_eq!(v.value(&[0.333]), (0.666f64).sin(), max_relative = 1e-6);
        assert_relative_eq!(v.partial(&[0.333], &mi(&[1])).unwrap(), 2.0 * (0.666f64).cos(), max_relative = 1e-4);
    }
}
