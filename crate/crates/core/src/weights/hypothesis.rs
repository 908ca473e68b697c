use super::sampling::distance_to_zeros;
use super::{SamplePlan, ShapeMap, WeightFamily, WeightFunction, WeightKind};
use crate::error::{Error, Result};
use crate::geometry::{norm2, CompactSet, Domain};
use crate::multi_index::MultiIndex;
use std::fmt;

/// Safety factor applied to grid suprema.
pub const SUP_SAFETY: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisKind {
    /// `s(α) ≤ |α|` and superadditivity of the shape map.
    ShapeMap,
    /// `|v|^{|α|+1} ≤ C_K |w_α|` on a compact `K`.
    Domination,
    /// `|∂^σ v| ≤ C n^{s(σ)−1}` on the annuli `M_n ∖ M_{2n}`.
    AnnulusDerivative,
    /// `|v| > δ` on `Ω ∖ K`.
    BoundaryFloor,
    /// `|∇v(x)|_p ≤ σ |v(x)| / |x|`.
    GradientRatio,
    /// `0 < 2σp/(d−p) < 1` (with `p − 1` in place of `d − p` when `d = 1`).
    DimensionWindow,
    /// Hypotheses of the non-integrability result for the Galerkin problem.
    Nonintegrability,
}

impl fmt::Display for HypothesisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HypothesisKind::ShapeMap => "shape map: s(a) <= |a| and s(a-b)+s(b) <= s(a)",
            HypothesisKind::Domination => "domination: |v|^(|a|+1) <= C_K |w_a| on K",
            HypothesisKind::AnnulusDerivative => "annulus derivative bound: |d^s v| <= C n^(s(s)-1) on M_n \\ M_2n",
            HypothesisKind::BoundaryFloor => "boundary floor: |v| > delta on Omega \\ K",
            HypothesisKind::GradientRatio => "gradient ratio: |grad v|_p <= sigma |v|/|x|",
            HypothesisKind::DimensionWindow => "dimension window: 0 < 2 sigma p/(d-p) < 1",
            HypothesisKind::Nonintegrability => "non-integrability hypotheses",
        };
        f.write_str(s)
    }
}

/// Where a hypothesis fails and by how much.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: Vec<f64>,
    pub value: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub kind: HypothesisKind,
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Extracted constant (`C_K`, `C`, `δ`, `σ`, or the window value).
    pub constant: Option<f64>,
    pub details: Vec<String>,
}

impl HypothesisReport {
    fn pass(kind: HypothesisKind, constant: Option<f64>) -> Self {
        HypothesisReport { kind, holds: true, witness: None, constant, details: vec![] }
    }

    fn fail(kind: HypothesisKind, witness: Witness, constant: Option<f64>) -> Self {
        HypothesisReport { kind, holds: false, details: vec![witness.label.clone()], witness: Some(witness), constant }
    }
}

/// Inputs consumed by [`hypothesis_check`]; each kind reads what it needs.
#[derive(Debug, Clone, Default)]
pub struct HypothesisParams {
    pub domain: Option<Domain>,
    pub compact: Option<CompactSet>,
    pub n_list: Vec<usize>,
    pub shape: Option<ShapeMap>,
    pub family: Option<WeightFamily>,
    pub sigma: Option<f64>,
    pub p: Option<f64>,
    pub dim: Option<usize>,
}

fn need<T: Clone>(v: &Option<T>, what: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::invalid(format!("missing parameter: {what}")))
}

/// Smallest `σ` with `|∇v(x)|_p ≤ σ|v(x)|/|x|` on the domain.
///
/// Closed form for the radial kinds, otherwise the grid supremum times
/// [`SUP_SAFETY`].
pub fn minimal_sigma(v: &WeightFunction, p: f64, domain: &Domain, plan: &SamplePlan) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::invalid(format!("p must be >= 1, got {p}")));
    }
    match v.kind() {
        WeightKind::One => return Ok(0.0),
        WeightKind::RadialPower { exponent } => {
            // sup over unit θ of ‖θ‖_p is d^{1/p − 1/2} for p ≤ 2 and 1 otherwise
            let d = v.dim() as f64;
            return Ok(exponent.abs() * d.powf((1.0 / p - 0.5).max(0.0)));
        }
        _ => {}
    }
    let (sup, _) = sigma_supremum(v, p, domain, plan)?;
    Ok(sup * SUP_SAFETY)
}

fn sigma_supremum(v: &WeightFunction, p: f64, domain: &Domain, plan: &SamplePlan) -> Result<(f64, Vec<f64>)> {
    let zeros = v.zero_points();
    let mut best = (0.0f64, vec![0.0; domain.dim()]);
    for x in plan.points(domain, &zeros) {
        let r = norm2(&x);
        if r == 0.0 {
            continue;
        }
        let val = v.value(&x);
        if val == 0.0 || !val.is_finite() {
            return Err(Error::singular(&x, "weight vanishes at a sample point outside its declared zero set"));
        }
        let g = v.gradient(&x);
        let gp = g.iter().map(|c| c.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        let ratio = gp * r / val.abs();
        if ratio > best.0 {
            best = (ratio, x);
        }
    }
    Ok(best)
}

/// Evaluate one of the pointwise hypotheses on `v`.
pub fn hypothesis_check(
    kind: HypothesisKind,
    v: &WeightFunction,
    params: &HypothesisParams,
    plan: &SamplePlan,
) -> Result<HypothesisReport> {
    match kind {
        HypothesisKind::Domination => domination(v, params, plan),
        HypothesisKind::AnnulusDerivative => annulus(v, params, plan),
        HypothesisKind::BoundaryFloor => floor(v, params, plan),
        HypothesisKind::GradientRatio => gradient_ratio(v, params, plan),
        HypothesisKind::DimensionWindow => {
            let sigma = need(&params.sigma, "sigma")?;
            let p = need(&params.p, "p")?;
            let d = params.dim.unwrap_or(v.dim());
            Ok(dimension_window(sigma, p, d))
        }
        HypothesisKind::ShapeMap => {
            let s = need(&params.shape, "shape map")?;
            super::validate_shape_map(&s, s.max_order() as i64)
        }
        HypothesisKind::Nonintegrability => {
            Err(Error::invalid("non-integrability is checked on coefficient sets, not on weights"))
        }
    }
}

/// Pure arithmetic on `(σ, p, d)`. In one dimension the window reads
/// `0 < 2σp/(p−1) < 1`.
pub fn dimension_window(sigma: f64, p: f64, d: usize) -> HypothesisReport {
    let denom = if d == 1 { p - 1.0 } else { d as f64 - p };
    let value = if denom > 0.0 { 2.0 * sigma * p / denom } else { f64::INFINITY };
    let kind = HypothesisKind::DimensionWindow;
    if value > 0.0 && value < 1.0 {
        HypothesisReport::pass(kind, Some(value))
    } else {
        HypothesisReport::fail(
            kind,
            Witness {
                point: vec![],
                value,
                label: format!("dimension window violated: 2*sigma*p/(d-p) = {value} with sigma={sigma}, p={p}, d={d}"),
            },
            Some(value),
        )
    }
}

fn domination(v: &WeightFunction, params: &HypothesisParams, plan: &SamplePlan) -> Result<HypothesisReport> {
    let domain = need(&params.domain, "domain")?;
    let compact = need(&params.compact, "compact set K")?;
    let family = need(&params.family, "weight family")?;
    let zeros = v.zero_points();
    let near = 1e-4 * domain.diameter();
    let pts: Vec<Vec<f64>> = plan.points(&domain, &zeros).into_iter().filter(|x| compact.contains(x)).collect();

    let mut c_k = 0.0f64;
    for alpha in family.indices() {
        let k = alpha.order() as f64 + 1.0;
        let (mut far_sup, mut all_sup, mut arg) = (0.0f64, 0.0f64, None);
        for x in &pts {
            let ratio = v.value(x).abs().powf(k) / family.weight(alpha, x)?;
            if !ratio.is_finite() {
                return Ok(HypothesisReport::fail(
                    HypothesisKind::Domination,
                    Witness {
                        point: x.clone(),
                        value: ratio,
                        label: format!("alpha={alpha}: w_a vanishes where |v|^(|a|+1) does not"),
                    },
                    None,
                ));
            }
            if ratio > all_sup {
                all_sup = ratio;
                arg = Some(x.clone());
            }
            if distance_to_zeros(x, &zeros) >= near {
                far_sup = far_sup.max(ratio);
            }
        }
        // A ratio that keeps growing into the zero neighbourhood is unbounded on K.
        if all_sup > 1.5 * far_sup && all_sup > 0.0 {
            return Ok(HypothesisReport::fail(
                HypothesisKind::Domination,
                Witness {
                    point: arg.unwrap_or_default(),
                    value: all_sup,
                    label: format!(
                        "alpha={alpha}: ratio |v|^(|a|+1)/|w_a| unbounded near the zero set ({all_sup:e} vs {far_sup:e})"
                    ),
                },
                None,
            ));
        }
        c_k = c_k.max(all_sup);
    }
    Ok(HypothesisReport::pass(HypothesisKind::Domination, Some(c_k * SUP_SAFETY)))
}

fn annulus(v: &WeightFunction, params: &HypothesisParams, plan: &SamplePlan) -> Result<HypothesisReport> {
    let domain = need(&params.domain, "domain")?;
    let shape = need(&params.shape, "shape map")?;
    if params.n_list.is_empty() {
        return Err(Error::invalid("missing parameter: n list"));
    }
    let m = shape.max_order().min(v.order());
    let pts = plan.points(&domain, &v.zero_points());
    let vals: Vec<f64> = pts.iter().map(|x| v.value(x).abs()).collect();

    let mut constant = 0.0f64;
    for sigma in MultiIndex::all_up_to(v.dim(), m).into_iter().filter(|s| !s.is_zero()) {
        let s_sigma = shape.value(&sigma)?;
        let mut history: Vec<(usize, f64, Vec<f64>)> = Vec::new();
        for &n in &params.n_list {
            let nf = n as f64;
            let mut best: Option<(f64, Vec<f64>)> = None;
            for (x, &a) in pts.iter().zip(&vals) {
                if a <= 1.0 / nf && a > 0.5 / nf {
                    let r = v.partial(x, &sigma)?.abs() / nf.powf(s_sigma - 1.0);
                    if best.as_ref().is_none_or(|b| r > b.0) {
                        best = Some((r, x.clone()));
                    }
                }
            }
            if let Some((r, x)) = best {
                if let Some(prev_max) = history.iter().map(|h| h.1).reduce(f64::max) {
                    if r > 1.1 * prev_max + 1e-300 && r > 1e-12 {
                        return Ok(HypothesisReport::fail(
                            HypothesisKind::AnnulusDerivative,
                            Witness {
                                point: x,
                                value: r,
                                label: format!(
                                    "sigma={sigma}, n={n}: scaled derivative {r:e} grows beyond earlier maximum {prev_max:e}"
                                ),
                            },
                            None,
                        ));
                    }
                }
                constant = constant.max(r);
                history.push((n, r, x));
            }
        }
    }
    Ok(HypothesisReport::pass(HypothesisKind::AnnulusDerivative, Some(constant * SUP_SAFETY)))
}

fn floor(v: &WeightFunction, params: &HypothesisParams, plan: &SamplePlan) -> Result<HypothesisReport> {
    let domain = need(&params.domain, "domain")?;
    let compact = need(&params.compact, "compact set K")?;
    let kind = HypothesisKind::BoundaryFloor;
    for z in v.zero_points() {
        if domain.closure_contains(&z) && !compact.interior_contains(&z) {
            return Ok(HypothesisReport::fail(
                kind,
                Witness { point: z.clone(), value: 0.0, label: format!("v vanishes at {z:?} outside the interior of K") },
                Some(0.0),
            ));
        }
    }
    let mut inf = (f64::INFINITY, vec![]);
    for x in plan.points(&domain, &v.zero_points()) {
        if compact.interior_contains(&x) {
            continue;
        }
        let a = v.value(&x).abs();
        if a < inf.0 {
            inf = (a, x);
        }
    }
    // the closure of Ω∖K also contains ∂K
    if let CompactSet::Interval { lo, hi } = compact {
        for e in [lo, hi] {
            if domain.contains(&[e]) {
                let a = v.value(&[e]).abs();
                if a < inf.0 {
                    inf = (a, vec![e]);
                }
            }
        }
    }
    if inf.0 > 0.0 {
        Ok(HypothesisReport::pass(kind, Some(inf.0)))
    } else {
        Ok(HypothesisReport::fail(
            kind,
            Witness { point: inf.1, value: inf.0, label: "v vanishes on Omega \\ K".into() },
            Some(0.0),
        ))
    }
}

fn gradient_ratio(v: &WeightFunction, params: &HypothesisParams, plan: &SamplePlan) -> Result<HypothesisReport> {
    let domain = need(&params.domain, "domain")?;
    let p = need(&params.p, "p")?;
    let sigma = minimal_sigma(v, p, &domain, plan)?;
    let kind = HypothesisKind::GradientRatio;
    match params.sigma {
        Some(claimed) if sigma > claimed * (1.0 + 1e-12) => {
            let (sup, at) = if v.is_radial() { (sigma, vec![]) } else { sigma_supremum(v, p, &domain, plan)? };
            Ok(HypothesisReport::fail(
                kind,
                Witness { point: at, value: sup, label: format!("gradient ratio {sup} exceeds sigma = {claimed}") },
                Some(sigma),
            ))
        }
        _ if !sigma.is_finite() => Ok(HypothesisReport::fail(
            kind,
            Witness { point: vec![], value: sigma, label: "gradient ratio unbounded".into() },
            None,
        )),
        Some(claimed) => Ok(HypothesisReport::pass(kind, Some(claimed))),
        None => Ok(HypothesisReport::pass(kind, Some(sigma))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn interval() -> Domain {
        Domain::interval(-1.0, 1.0).unwrap()
    }

    #[test]
    fn sigma_closed_forms() {
        let plan = SamplePlan::default();
        let v = WeightFunction::radial_power(2.0, 12, 1);
        let ball = Domain::ball(1.0, 12).unwrap();
        assert_eq!(minimal_sigma(&v, 2.0, &ball, &plan).unwrap(), 2.0);
        assert_eq!(minimal_sigma(&WeightFunction::one(1), 2.0, &interval(), &plan).unwrap(), 0.0);
    }

    #[test]
    fn sigma_of_shifted_sine_by_grid() {
        // Independent oracle: brute-force supremum of |v'| |x| / |v| at 10⁴ points.
        let oracle = (0..=10_000)
            .map(|i| -1.0 + 2.0 * i as f64 / 10_000.0)
            .map(|x: f64| (0.25 * (x / 4.0).cos()).abs() * x.abs() / (4.0 + (x / 4.0).sin()))
            .fold(0.0, f64::max);
        let v = WeightFunction::affine_trig(4.0, 1.0, 0.25, 2);
        let s = minimal_sigma(&v, 2.0, &interval(), &SamplePlan::default()).unwrap();
        assert_relative_eq!(s, oracle * SUP_SAFETY, max_relative = 1e-3);
        assert!(s < 1.0 / 12.0);
    }

    #[test]
    fn floor_with_and_without_compact() {
        let v = WeightFunction::identity(1);
        let plan = SamplePlan::default();
        let mut params = HypothesisParams {
            domain: Some(interval()),
            compact: Some(CompactSet::Interval { lo: -0.5, hi: 0.5 }),
            ..Default::default()
        };
        let r = hypothesis_check(HypothesisKind::BoundaryFloor, &v, &params, &plan).unwrap();
        assert!(r.holds);
        assert_relative_eq!(r.constant.unwrap(), 0.5, max_relative = 1e-12);

        params.compact = Some(CompactSet::Empty);
        let r = hypothesis_check(HypothesisKind::BoundaryFloor, &v, &params, &plan).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!(v.value(&w.point), 0.0);
    }

    #[test]
    fn window_arithmetic() {
        let r = dimension_window(2.0, 2.0, 12);
        assert!(r.holds);
        assert_relative_eq!(r.constant.unwrap(), 0.8);
        let r = dimension_window(2.0, 2.0, 3);
        assert!(!r.holds);
        assert_relative_eq!(r.witness.unwrap().value, 8.0);
        assert!(dimension_window(1.0 / 12.0, 2.0, 1).holds);
        assert!(!dimension_window(0.0, 2.0, 12).holds);
    }

    #[test]
    fn missing_params_are_invalid() {
        let v = WeightFunction::identity(1);
        let r = hypothesis_check(HypothesisKind::Domination, &v, &HypothesisParams::default(), &SamplePlan::coarse());
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn annulus_bound_for_identity_weight() {
        let v = WeightFunction::identity(2);
        let params = HypothesisParams {
            domain: Some(interval()),
            shape: Some(ShapeMap::abs(1, 2)),
            n_list: vec![4, 8, 16, 32],
            ..Default::default()
        };
        let r = hypothesis_check(HypothesisKind::AnnulusDerivative, &v, &params, &SamplePlan::default()).unwrap();
        assert!(r.holds);
        assert_relative_eq!(r.constant.unwrap(), SUP_SAFETY, max_relative = 1e-12);
    }

    #[test]
    fn annulus_bound_fails_for_shrunken_shape() {
        // s ≡ 0 on |σ| = 1 demands |v'| ≤ C/n, impossible for v = x
        let v = WeightFunction::identity(1);
        let shape = ShapeMap::from_fn(1, 1, |_| 0.0);
        let params =
            HypothesisParams { domain: Some(interval()), shape: Some(shape), n_list: vec![4, 8, 16, 32], ..Default::default() };
        let r = hypothesis_check(HypothesisKind::AnnulusDerivative, &v, &params, &SamplePlan::default()).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert!(v.value(&w.point).abs() <= 1.0 / 8.0);
    }

    #[test]
    fn gradient_ratio_against_claimed_sigma() {
        let v = WeightFunction::affine_trig(4.0, 1.0, 0.25, 1);
        let params = HypothesisParams { domain: Some(interval()), p: Some(2.0), sigma: Some(1.0 / 12.0), ..Default::default() };
        assert!(hypothesis_check(HypothesisKind::GradientRatio, &v, &params, &SamplePlan::default()).unwrap().holds);
        let params = HypothesisParams { sigma: Some(0.05), ..params };
        let r = hypothesis_check(HypothesisKind::GradientRatio, &v, &params, &SamplePlan::default()).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        let x = w.point[0];
        let ratio = (0.25 * (x / 4.0).cos()).abs() * x.abs() / v.value(&[x]);
        assert!(ratio > 0.05);
    }
}
