//! The transition profile `η`, the cutoff family `χ_n = η(n·v)` and the
//! growth of its derivatives.

mod partitions;

pub use partitions::{chain_rule_terms, compose_partial, multiindex_partitions, ChainTerm, MultisetPartition};

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::jet::{exp_neg_recip, Jet, JET_LEN};
use crate::multi_index::MultiIndex;
use crate::weights::{SamplePlan, ShapeMap, WeightFunction};

/// Highest derivative of `η` carried by the profile.
pub const MAX_PROFILE_ORDER: usize = JET_LEN - 1;

const SUP_SAMPLES: usize = 10_000;

/// `G(u) = e(u)/(e(u)+e(1−u))` with `e(u) = exp(−1/u)`.
fn smoothstep(u: Jet) -> Jet {
    if u.value() <= 0.0 {
        return Jet::zero();
    }
    if u.value() >= 1.0 {
        return Jet::constant(1.0);
    }
    let a = exp_neg_recip(u);
    let b = exp_neg_recip(Jet::constant(1.0) - u);
    a / (a + b)
}

/// `η(t) = G(2(|t| − 1/2))`: zero on `[−1/2, 1/2]`, one outside `[−1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionProfile {
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// `sup |η^{(k)}|` for `k ≤ order`, tabulated on a dense grid.
    pub derivative_sup: Vec<f64>,
}

impl TransitionProfile {
    pub fn build(order_hint: usize) -> Self {
        let order = order_hint.min(MAX_PROFILE_ORDER);
        let mut sup = vec![0.0f64; order + 1];
        sup[0] = 1.0;
        for i in 0..=SUP_SAMPLES {
            let t = 0.5 + 0.5 * i as f64 / SUP_SAMPLES as f64;
            let d = Self::jet(t).derivatives();
            for k in 1..=order {
                sup[k] = sup[k].max(d[k].abs());
            }
        }
        TransitionProfile { inner_radius: 0.5, outer_radius: 1.0, derivative_sup: sup }
    }

    fn jet(t: f64) -> Jet {
        // η is even; expand at |t| and flip odd derivatives afterwards
        let u = (Jet::variable(t.abs()) - Jet::constant(0.5)).scale(2.0);
        smoothstep(u)
    }

    pub fn value(&self, t: f64) -> f64 {
        Self::jet(t).value()
    }

    /// `η^{(k)}(t)` for `k ≤ 5`.
    pub fn derivatives(&self, t: f64) -> [f64; JET_LEN] {
        let mut d = Self::jet(t).derivatives();
        if t < 0.0 {
            for (k, dk) in d.iter_mut().enumerate() {
                if k % 2 == 1 {
                    *dk = -*dk;
                }
            }
        }
        d
    }

    /// `G(u)` on its own, for checking `G(u) + G(1−u) = 1`.
    pub fn smoothstep(u: f64) -> f64 {
        smoothstep(Jet::constant(u)).value()
    }
}

/// `χ_n = η(n·v)`.
#[derive(Debug, Clone)]
pub struct CutoffFamily {
    pub profile: TransitionProfile,
    pub v: WeightFunction,
    pub n: usize,
}

impl CutoffFamily {
    pub fn new(v: WeightFunction, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("cutoff index n must be positive"));
        }
        let order = v.order().min(MAX_PROFILE_ORDER);
        Ok(CutoffFamily { profile: TransitionProfile::build(order), v, n })
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("cutoff index n must be positive"));
        }
        Ok(CutoffFamily { n, ..self.clone() })
    }

    /// `∂^α χ_n(x)`.
    pub fn eval(&self, x: &[f64], alpha: &MultiIndex) -> Result<f64> {
        chi_eval(self, x, alpha)
    }
}

/// `∂^α χ_n(x)` by Faà di Bruno over the partitions of `𝒜(α)`.
pub fn chi_eval(family: &CutoffFamily, x: &[f64], alpha: &MultiIndex) -> Result<f64> {
    let k = alpha.order();
    if k > family.v.order() || k > MAX_PROFILE_ORDER {
        return Err(Error::invalid(format!(
            "derivative order {k} exceeds the available order {}",
            family.v.order().min(MAX_PROFILE_ORDER)
        )));
    }
    if alpha.dim() != family.v.dim() || x.len() != family.v.dim() {
        return Err(Error::invalid("dimension mismatch between α, x and v"));
    }
    let nf = family.n as f64;
    let t = nf * family.v.value(x);
    if t.abs() <= 0.5 {
        return Ok(0.0);
    }
    if t.abs() >= 1.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let d = family.profile.derivatives(t);
    let mut outer = [0.0; JET_LEN];
    let mut pow = 1.0;
    for (j, o) in outer.iter_mut().enumerate().take(k + 1) {
        *o = d[j] * pow;
        pow *= nf;
    }
    let v = &family.v;
    Ok(compose_partial(&outer, alpha, |b| v.partial_positions(x, b)))
}

/// Result of a log–log fit `sup |∂^σ χ_n| ≈ C n^e`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    /// `(n, sup)` per n; `None` when the annulus `M_n ∖ M_{2n}` has no sample points.
    pub sups: Vec<(usize, Option<f64>)>,
    pub constant: Option<f64>,
    pub exponent: Option<f64>,
    /// The target exponent `s(σ)`.
    pub target: f64,
    pub warnings: Vec<String>,
}

/// Grid suprema of `|∂^σ χ_n|` over the annuli and their log–log slope.
pub fn chi_growth_fit(
    v: &WeightFunction,
    s: &ShapeMap,
    sigma: &MultiIndex,
    n_list: &[usize],
    domain: &Domain,
    plan: &SamplePlan,
) -> Result<GrowthFit> {
    if n_list.len() < 4 {
        return Err(Error::invalid(format!("growth fit needs at least 4 values of n, got {}", n_list.len())));
    }
    let target = s.value(sigma)?;
    let family = CutoffFamily::new(v.clone(), n_list[0])?;
    let pts = plan.points(domain, &v.zero_points());
    let vals: Vec<f64> = pts.iter().map(|x| v.value(x).abs()).collect();

    let mut sups = Vec::with_capacity(n_list.len());
    let mut warnings = Vec::new();
    for &n in n_list {
        let fam = family.with_n(n)?;
        let nf = n as f64;
        let mut sup: Option<f64> = None;
        for (x, &a) in pts.iter().zip(&vals) {
            if a > 0.5 / nf && a < 1.0 / nf {
                let d = chi_eval(&fam, x, sigma)?.abs();
                sup = Some(sup.map_or(d, |s| s.max(d)));
            }
        }
        if sup.is_none() {
            warnings.push(format!("annulus for n = {n} is empty; skipped"));
        }
        sups.push((n, sup));
    }

    let data: Vec<(f64, f64)> =
        sups.iter().filter_map(|&(n, s)| s.filter(|&s| s > 0.0).map(|s| ((n as f64).ln(), s.ln()))).collect();
    let (constant, exponent) = if data.len() >= 2 {
        let (b, a) = least_squares(&data);
        (Some(a.exp()), Some(b))
    } else {
        warnings.push("fewer than two non-empty annuli; no fit".into());
        (None, None)
    };
    Ok(GrowthFit { sups, constant, exponent, target, warnings })
}

/// Slope and intercept of the least-squares line through `(x, y)`.
fn least_squares(data: &[(f64, f64)]) -> (f64, f64) {
    let n = data.len() as f64;
    let mx = data.iter().map(|p| p.0).sum::<f64>() / n;
    let my = data.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = data.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = data.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
