use super::field::ScalarField;
use crate::error::{Error, Result};
use crate::geometry::{
    build_interval_mesh, integrate, integrate_radial, sphere_area, sphere_lp_moment, Domain, QuadratureRule, DEFAULT_ORDER,
};
use crate::multi_index::MultiIndex;
use crate::weights::{
    dimension_window, hypothesis_check, minimal_sigma, HypothesisKind, HypothesisParams, SamplePlan, WeightFunction,
};
use rand::Rng;
use std::fmt;

/// Inequality slack relative to the larger side.
pub const INEQUALITY_TOL: f64 = 1e-8;
const CELLS_1D: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InequalityKind {
    /// `‖f/|x|‖_p ≤ p/(d−p) ‖∇f‖_p`.
    Hardy,
    /// `‖f∇(v²)‖_p ≤ 2σp/(d−p−2σp) ‖v² D_v f‖_p`.
    Kebiche,
    /// `‖f(v²)′‖_p ≤ 2σp/(p−1−2σp) ‖v² D_v f‖_p` on an interval.
    OneD,
    /// `‖v² f‖_p ≤ C_Ω ‖v² D_v f‖_p`.
    PoincareCor,
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InequalityKind::Hardy => "hardy",
            InequalityKind::Kebiche => "kebiche",
            InequalityKind::OneD => "oned",
            InequalityKind::PoincareCor => "poincare_cor",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginReport {
    pub kind: InequalityKind,
    pub lhs: f64,
    pub rhs: f64,
    pub constant_used: f64,
    /// `constant_used · rhs − lhs`.
    pub margin: f64,
    pub holds: bool,
}

impl MarginReport {
    fn new(kind: InequalityKind, lhs: f64, rhs: f64, constant_used: f64) -> Self {
        let margin = constant_used * rhs - lhs;
        let scale = lhs.abs().max((constant_used * rhs).abs());
        MarginReport { kind, lhs, rhs, constant_used, margin, holds: margin >= -INEQUALITY_TOL * scale }
    }
}

/// Problem data for [`inequality_check`]. Radial fields are given as
/// profiles `f(r)` with `f'` declared; one-dimensional fields directly.
#[derive(Debug, Clone)]
pub struct InequalitySetup {
    pub kind: InequalityKind,
    pub p: f64,
    pub domain: Domain,
    /// Supplied `σ`; the minimal one is used when absent.
    pub sigma: Option<f64>,
    /// Supplied `C_Ω` for the Poincaré corollary.
    pub c_omega: Option<f64>,
}

/// `σ`, the window value and the inequality constant `2σp/(D−2σp)`, after
/// certifying the gradient bound and the dimension window.
pub fn certified_constant(v: &WeightFunction, setup: &InequalitySetup) -> Result<(f64, f64)> {
    let d = setup.domain.dim();
    let plan = SamplePlan::for_domain(&setup.domain);
    let sigma = match setup.sigma {
        Some(s) => s,
        None => minimal_sigma(v, setup.p, &setup.domain, &plan)?,
    };
    let params =
        HypothesisParams { domain: Some(setup.domain.clone()), p: Some(setup.p), sigma: Some(sigma), ..Default::default() };
    let g = hypothesis_check(HypothesisKind::GradientRatio, v, &params, &plan)?;
    if !g.holds {
        let w = g.witness.map(|w| w.label).unwrap_or_default();
        return Err(Error::Hypothesis(format!("gradient ratio |grad v|_p <= sigma |v|/|x| fails: {w}")));
    }
    let win = dimension_window(sigma, setup.p, d);
    if !win.holds {
        return Err(Error::Hypothesis(format!(
            "dimension window 0 < 2 sigma p/(d-p) < 1 violated: value {} (sigma = {sigma}, p = {}, d = {d})",
            win.constant.unwrap_or(f64::NAN),
            setup.p
        )));
    }
    let w = win.constant.unwrap();
    Ok((sigma, w / (1.0 - w)))
}

fn radial(g: impl Fn(f64) -> f64 + Sync, d: usize, r: f64, p: f64) -> Result<f64> {
    let i = integrate_radial(g, d, r, DEFAULT_ORDER)?;
    i.value().map(|v| v.max(0.0).powf(1.0 / p)).ok_or_else(|| Error::Hypothesis("a side of the inequality is not finite".into()))
}

fn on_interval(g: impl Fn(f64) -> f64 + Sync, a: f64, b: f64, p: f64) -> Result<f64> {
    let mesh = build_interval_mesh(a, b, CELLS_1D, 1.0, a)?;
    Ok(integrate(|x| g(x[0]), &mesh, &QuadratureRule::interval(DEFAULT_ORDER))?.max(0.0).powf(1.0 / p))
}

/// Evaluate both sides of the chosen inequality for `f` and report the margin.
pub fn inequality_check(setup: &InequalitySetup, v: &WeightFunction, f: &ScalarField) -> Result<MarginReport> {
    let p = setup.p;
    if !(p >= 1.0) {
        return Err(Error::invalid(format!("p must be >= 1, got {p}")));
    }
    if f.dim() != 1 {
        return Err(Error::invalid("inequality fields are radial profiles or one-dimensional"));
    }
    let df = f.derivative(&MultiIndex::new(vec![1]))?;
    let fv = |r: f64| f.value(&[r]);
    let dfv = |r: f64| df(&[r]);
    let kind = setup.kind;
    match (kind, &setup.domain) {
        (InequalityKind::Hardy, &Domain::Ball { radius, dim }) => {
            if !(p < dim as f64) {
                return Err(Error::Hypothesis(format!("Hardy needs p < d, got p = {p}, d = {dim}")));
            }
            let lhs = radial(|r| (fv(r) / r).abs().powf(p), dim, radius, p)?;
            let rhs = radial(|r| dfv(r).abs().powf(p), dim, radius, p)?;
            Ok(MarginReport::new(kind, lhs, rhs, p / (dim as f64 - p)))
        }
        (InequalityKind::Kebiche | InequalityKind::PoincareCor, &Domain::Ball { radius, dim }) if dim >= 2 => {
            let (_, k) = certified_constant(v, setup)?;
            let prof = |r: f64| v.radial_profile(r).ok_or_else(|| Error::invalid("radial inequalities need a radial weight"));
            prof(radius)?;
            let vv = |r: f64| prof(r).map(|p| p.0).unwrap_or(f64::NAN);
            let dv = |r: f64| prof(r).map(|p| p.1).unwrap_or(f64::NAN);
            let rhs = radial(|r| (vv(r).powi(2) * dfv(r)).abs().powf(p), dim, radius, p)?;
            if kind == InequalityKind::Kebiche {
                // |θ|_p^p averaged over the sphere turns the componentwise norm radial
                let ratio = sphere_lp_moment(dim, p) / sphere_area(dim);
                let lhs = radial(|r| ratio * (fv(r) * 2.0 * vv(r) * dv(r)).abs().powf(p), dim, radius, p)?;
                Ok(MarginReport::new(kind, lhs, rhs, k))
            } else {
                let c = setup.c_omega.unwrap_or(setup.domain.diameter() * (1.0 + k));
                let lhs = radial(|r| (vv(r).powi(2) * fv(r)).abs().powf(p), dim, radius, p)?;
                Ok(MarginReport::new(kind, lhs, rhs, c))
            }
        }
        (InequalityKind::OneD | InequalityKind::PoincareCor, &Domain::Interval { a, b }) => {
            if !(p > 1.0) {
                return Err(Error::invalid("the one-dimensional inequality needs p > 1"));
            }
            let (_, k) = certified_constant(v, setup)?;
            let d1 = MultiIndex::new(vec![1]);
            let vv = |x: f64| v.value(&[x]);
            let dv = |x: f64| v.partial(&[x], &d1).unwrap_or(f64::NAN);
            let rhs = on_interval(|x| (vv(x).powi(2) * dfv(x)).abs().powf(p), a, b, p)?;
            if kind == InequalityKind::OneD {
                let lhs = on_interval(|x| (fv(x) * 2.0 * vv(x) * dv(x)).abs().powf(p), a, b, p)?;
                Ok(MarginReport::new(kind, lhs, rhs, k))
            } else {
                let c = setup.c_omega.unwrap_or(setup.domain.diameter() * (1.0 + k));
                let lhs = on_interval(|x| (vv(x).powi(2) * fv(x)).abs().powf(p), a, b, p)?;
                Ok(MarginReport::new(kind, lhs, rhs, c))
            }
        }
        (k, d) => Err(Error::invalid(format!("inequality {k} is not available on {d:?}"))),
    }
}

/// `(R − r) Σ_{k<n} c_k r^k` with `c_k` uniform in `[−1, 1]`.
pub fn random_radial_polynomial(rng: &mut impl Rng, radius: f64, terms: usize) -> ScalarField {
    let c: Vec<f64> = (0..terms).map(|_| rng.random_range(-1.0..1.0)).collect();
    let c2 = c.clone();
    let poly = move |c: &[f64], r: f64| c.iter().rev().fold(0.0, |acc, ck| acc * r + ck);
    let dpoly = move |c: &[f64], r: f64| c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, ck)| acc * r + k as f64 * ck);
    ScalarField::univariate(move |r| (radius - r) * poly(&c, r))
        .with_univariate_derivative(1, move |r| -poly(&c2, r) + (radius - r) * dpoly(&c2, r))
}

/// A bump `exp(−1/(1−t²))` with random centre and radius inside `(a, b)`.
pub fn random_bump(rng: &mut impl Rng, a: f64, b: f64) -> ScalarField {
    let len = b - a;
    let rad = rng.random_range(0.1..0.5) * len;
    let c = rng.random_range(a + rad..b - rad);
    let amp = rng.random_range(0.5..1.5);
    let bump = super::battery::Bump { center: vec![c], radius: rad, amplitude: amp };
    let b2 = bump.clone();
    ScalarField::new(1, move |x| bump.value(x))
        .with_derivative(MultiIndex::new(vec![1]), move |x| b2.partial(x, &MultiIndex::new(vec![1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(kind: InequalityKind, domain: Domain, sigma: Option<f64>) -> InequalitySetup {
        InequalitySetup { kind, p: 2.0, domain, sigma, c_omega: None }
    }

    #[test]
    fn polynomial_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_radial_polynomial(&mut rng, 1.0, 4);
        let h = 1e-6;
        let fd = (f.value(&[0.4 + h]) - f.value(&[0.4 - h])) / (2.0 * h);
        assert_relative_eq!(f.eval_derivative(&MultiIndex::new(vec![1]), &[0.4]).unwrap(), fd, max_relative = 1e-7);
        assert!(f.value(&[1.0]).abs() < 1e-15);
    }

    #[test]
    fn hardy_and_kebiche_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v = WeightFunction::radial_power(2.0, 12, 1);
        for (d, kind) in [
            (3, InequalityKind::Hardy),
            (12, InequalityKind::Hardy),
            (12, InequalityKind::Kebiche),
            (11, InequalityKind::Kebiche),
        ] {
            let s = setup(kind, Domain::ball(1.0, d).unwrap(), None);
            let v = v.clone().with_dim(d);
            for _ in 0..10 {
                let f = random_radial_polynomial(&mut rng, 1.0, 4);
                let r = inequality_check(&s, &v, &f).unwrap();
                assert!(r.holds, "{r:?}");
            }
        }
        let s = setup(InequalityKind::Kebiche, Domain::ball(1.0, 12).unwrap(), None);
        let r = inequality_check(&s, &v, &random_radial_polynomial(&mut rng, 1.0, 3)).unwrap();
        assert_relative_eq!(r.constant_used, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_field_is_trivial() {
        let s = setup(InequalityKind::Hardy, Domain::ball(1.0, 3).unwrap(), None);
        let r = inequality_check(&s, &WeightFunction::one(3), &ScalarField::zero(1)).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (0.0, 0.0, true));
    }

    #[test]
    fn one_dimensional_theorem() {
        let v = WeightFunction::affine_trig(4.0, 1.0, 0.25, 1);
        let s = setup(InequalityKind::OneD, Domain::interval(-1.0, 1.0).unwrap(), Some(1.0 / 12.0));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let r = inequality_check(&s, &v, &random_bump(&mut rng, -1.0, 1.0)).unwrap();
            assert!(r.holds);
            assert_relative_eq!(r.constant_used, 0.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn window_violation_is_a_hypothesis_error() {
        let v = WeightFunction::radial_power(2.0, 3, 1);
        let s = setup(InequalityKind::Kebiche, Domain::ball(1.0, 3).unwrap(), Some(2.0));
        let e = inequality_check(&s, &v, &ScalarField::zero(1)).unwrap_err();
        assert!(matches!(e, Error::Hypothesis(ref m) if m.contains("dimension window")));
    }

    #[test]
    fn poincare_corollary_default_constant() {
        let v = WeightFunction::radial_power(2.0, 12, 1);
        let s = setup(InequalityKind::PoincareCor, Domain::ball(1.0, 12).unwrap(), None);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = inequality_check(&s, &v, &random_radial_polynomial(&mut rng, 1.0, 3)).unwrap();
        assert_relative_eq!(r.constant_used, 10.0, max_relative = 1e-12);
        assert!(r.holds);
    }
}
