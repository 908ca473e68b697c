use super::coeffs::{Coefficient, CoefficientSet};
use crate::geometry::Domain;
use crate::weights::{SamplePlan, SUP_SAFETY};
use std::fmt;

/// Safety factor applied to grid infima of non-constant coefficients.
pub const INF_SAFETY: f64 = 0.99;
/// Resolution of the case-1 binary search for `γ`.
pub const GAMMA_RESOLUTION: f64 = 1e-6;

/// Which sufficient condition for coercivity of `B_v` was met.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoercivityCase {
    /// Small drift: `d^{1/2}‖v⁻³b‖_∞ < 2√(μσ)`.
    Case1,
    /// Drift controlled by the Poincaré constant: `0 < μ − C_Ω d^{1/2}‖v⁻⁴b‖_∞`.
    Case2,
    /// `div b ≤ 0`.
    Case3a,
    /// `(c − ½div b)v⁻² ≥ σ > 0`.
    Case3b,
    None,
}

impl fmt::Display for CoercivityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoercivityCase::Case1 => "case1",
            CoercivityCase::Case2 => "case2",
            CoercivityCase::Case3a => "case3a",
            CoercivityCase::Case3b => "case3b",
            CoercivityCase::None => "none",
        })
    }
}

/// Certified lower bound `γ‖f‖²_X ≤ B_v(f,f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityReport {
    pub case: CoercivityCase,
    /// Ellipticity constant of `ã`.
    pub mu: f64,
    /// Lower bound of `c̃` (of `c̃ − ½v⁻²div b` in case 3b).
    pub sigma: f64,
    /// Zero when no case applies.
    pub gamma: f64,
    /// One line per condition examined.
    pub details: Vec<String>,
}

impl CoercivityReport {
    pub fn holds(&self) -> bool {
        self.case != CoercivityCase::None
    }
}

/// Smallest eigenvalue of the symmetric part of `m`; for `d > 2` a
/// Gershgorin lower bound.
fn min_eigenvalue(m: &[Vec<f64>]) -> f64 {
    let d = m.len();
    let s = |i: usize, j: usize| 0.5 * (m[i][j] + m[j][i]);
    match d {
        1 => m[0][0],
        2 => {
            let (a, b, c) = (s(0, 0), s(0, 1), s(1, 1));
            let mean = 0.5 * (a + c);
            mean - (0.25 * (a - c).powi(2) + b * b).sqrt()
        }
        _ => {
            (0..d).map(|i| s(i, i) - (0..d).filter(|&j| j != i).map(|j| s(i, j).abs()).sum::<f64>()).fold(f64::INFINITY, f64::min)
        }
    }
}

fn all_constant(cs: &[&Coefficient]) -> bool {
    cs.iter().all(|c| c.as_constant().is_some())
}

fn lower(v: f64, exact: bool) -> f64 {
    if exact || v <= 0.0 {
        v
    } else {
        INF_SAFETY * v
    }
}

fn upper(v: f64, exact: bool) -> f64 {
    if exact {
        v
    } else {
        SUP_SAFETY * v
    }
}

/// Largest `γ ∈ (0, min(μ,σ)]` with `d^{1/2}B < 2√((μ−γ)(σ−γ))`, to
/// [`GAMMA_RESOLUTION`]; `None` if none exists.
fn case1_gamma(mu: f64, sigma: f64, drift: f64, d: usize) -> Option<f64> {
    let lhs = (d as f64).sqrt() * drift;
    let ok = |g: f64| lhs < 2.0 * ((mu - g) * (sigma - g)).sqrt();
    let top = mu.min(sigma);
    if !(top > 0.0) || !ok(0.0) {
        return None;
    }
    if ok(top) {
        return Some(top);
    }
    let (mut lo, mut hi) = (0.0, top);
    while hi - lo > GAMMA_RESOLUTION * top {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo > 0.0).then_some(lo)
}

/// Checks the sufficient conditions in the order 1, 3a, 3b, 2 and returns
/// the first that holds. Pointwise infima and suprema come from a sample
/// grid of `domain`; `c_omega` is the Poincaré constant needed by case 2.
pub fn coercivity_check(coeffs: &CoefficientSet, domain: &Domain, c_omega: Option<f64>, plan: &SamplePlan) -> CoercivityReport {
    let d = coeffs.dim();
    let pts = plan.points(domain, &coeffs.v.zero_points());
    let a_exact = all_constant(&coeffs.a_tilde.iter().flatten().collect::<Vec<_>>());
    let c_exact = coeffs.c_tilde.as_constant().is_some();
    let b_exact = all_constant(&coeffs.b_tilde.iter().collect::<Vec<_>>());
    let mut details = Vec::new();

    let a_at = |x: &[f64]| -> Vec<Vec<f64>> { coeffs.a_tilde.iter().map(|r| r.iter().map(|c| c.value(x)).collect()).collect() };
    let mu = if a_exact {
        min_eigenvalue(&a_at(&vec![0.0; d]))
    } else {
        lower(pts.iter().map(|x| min_eigenvalue(&a_at(x))).fold(f64::INFINITY, f64::min), false)
    };
    let sigma = match coeffs.c_tilde.as_constant() {
        Some(c) => c,
        None => lower(pts.iter().map(|x| coeffs.c_tilde.value(x)).fold(f64::INFINITY, f64::min), c_exact),
    };
    details.push(format!("ellipticity mu = {mu:e}"));
    details.push(format!("inf c_tilde = sigma = {sigma:e}"));

    let sup_over = |f: &dyn Fn(&[f64]) -> f64| pts.iter().map(|x| f(x).abs()).fold(0.0, f64::max);
    // ‖v⁻³b‖ = max_i sup |b̃_i|
    let drift = if b_exact {
        coeffs.b_tilde.iter().map(|c| c.as_constant().unwrap().abs()).fold(0.0, f64::max)
    } else {
        upper(coeffs.b_tilde.iter().map(|c| sup_over(&|x| c.value(x))).fold(0.0, f64::max), false)
    };
    details.push(format!("sup |v^-3 b| = {drift:e}"));

    let report = |case, sigma, gamma, details| CoercivityReport { case, mu, sigma, gamma, details };

    if mu > 0.0 && sigma > 0.0 {
        if let Some(g) = case1_gamma(mu, sigma, drift, d) {
            details.push(format!("case1: d^(1/2)·{drift:e} < 2 sqrt(mu sigma) holds, gamma = {g:e}"));
            return report(CoercivityCase::Case1, sigma, g, details);
        }
        details.push(format!("case1: d^(1/2)·{drift:e} >= 2 sqrt(mu sigma) = {:e}", 2.0 * (mu * sigma).sqrt()));
    } else {
        details.push("case1: needs mu > 0 and sigma > 0".into());
    }

    let div: Option<Vec<f64>> = pts.iter().map(|x| coeffs.div_b(x)).collect();
    match &div {
        None => details.push("case3: b_tilde has no declared gradient".into()),
        Some(div) => {
            let max_div = div.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max_div <= 0.0 && mu > 0.0 && sigma > 0.0 {
                details.push(format!("case3a: max div b = {max_div:e} <= 0"));
                return report(CoercivityCase::Case3a, sigma, mu.min(sigma), details);
            }
            details.push(format!("case3a: max div b = {max_div:e}"));
            let s3 = pts
                .iter()
                .zip(div)
                .map(|(x, dv)| coeffs.c_tilde.value(x) - 0.5 * dv / coeffs.v.value(x).powi(2))
                .fold(f64::INFINITY, f64::min);
            let s3 = lower(s3, false);
            if s3 > 0.0 && mu > 0.0 {
                details.push(format!("case3b: inf (c - div b/2) v^-2 = {s3:e} > 0"));
                return report(CoercivityCase::Case3b, s3, mu.min(s3), details);
            }
            details.push(format!("case3b: inf (c - div b/2) v^-2 = {s3:e} <= 0"));
        }
    }

    match c_omega {
        None => details.push("case2: no Poincare constant supplied".into()),
        Some(c_om) => {
            let drift4 =
                upper(coeffs.b_tilde.iter().map(|c| sup_over(&|x| c.value(x) / coeffs.v.value(x))).fold(0.0, f64::max), false);
            let margin = mu - c_om * (d as f64).sqrt() * drift4;
            if margin > 0.0 && sigma > 0.0 {
                details.push(format!("case2: mu - C_omega d^(1/2) sup|v^-4 b| = {margin:e} > 0"));
                return report(CoercivityCase::Case2, sigma, margin.min(sigma), details);
            }
            details.push(format!("case2: mu - C_omega d^(1/2) sup|v^-4 b| = {margin:e}"));
        }
    }
    report(CoercivityCase::None, sigma, 0.0, details)
}
