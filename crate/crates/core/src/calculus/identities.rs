use super::battery::{Bump, TestFunctionBattery};
use super::field::ScalarField;
use crate::cutoff::compose_partial;
use crate::error::{Error, Result};
use crate::geometry::{integrate, Domain, Mesh, QuadratureRule};
use crate::multi_index::MultiIndex;
use crate::weights::WeightFunction;

/// Default relative tolerance for identity residuals.
pub const IDENTITY_TOL: f64 = 1e-6;

/// Residual of an identity `L = R` tested against a family of functions.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// `max_j |L_j − R_j|`.
    pub residual: f64,
    /// `max_j max(|L_j|, |R_j|)`.
    pub scale: f64,
    pub relative: f64,
    /// `(L_j, R_j)` per test function.
    pub per_test_function: Vec<(f64, f64)>,
}

impl ResidualReport {
    pub fn from_pairs(pairs: Vec<(f64, f64)>) -> Self {
        let residual = pairs.iter().map(|(l, r)| (l - r).abs()).fold(0.0, f64::max);
        let scale = pairs.iter().map(|(l, r)| l.abs().max(r.abs())).fold(0.0, f64::max);
        let relative = if scale > 0.0 { residual / scale } else { 0.0 };
        ResidualReport { residual, scale, relative, per_test_function: pairs }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.relative <= tol
    }
}

/// `∂^β (v^k)(x)` for an integer power `k ≥ 0`.
pub fn power_partial(v: &WeightFunction, k: u32, x: &[f64], beta: &MultiIndex) -> f64 {
    let u = v.value(x);
    if beta.is_zero() {
        return u.powi(k as i32);
    }
    let n = beta.order();
    let mut outer = vec![0.0; n + 1];
    let mut falling = 1.0;
    for (j, o) in outer.iter_mut().enumerate() {
        *o = if j as u32 > k { 0.0 } else { falling * u.powi(k as i32 - j as i32) };
        falling *= k as f64 - j as f64;
    }
    compose_partial(&outer, beta, |b| v.partial_positions(x, b))
}

/// `∂^α (v^k φ)(x)` by the Leibniz rule over `β ≤ α`.
fn weighted_bump_partial(v: &WeightFunction, k: u32, phi: &Bump, x: &[f64], alpha: &MultiIndex) -> f64 {
    alpha
        .lower_set()
        .iter()
        .map(|beta| {
            let p = phi.partial(x, &alpha.sub(beta));
            if p == 0.0 {
                0.0
            } else {
                alpha.binomial(beta) * power_partial(v, k, x, beta) * p
            }
        })
        .sum()
}

fn check_order(v: &WeightFunction, alpha: &MultiIndex) -> Result<()> {
    if alpha.order() == 0 {
        return Err(Error::invalid("identity residuals need |α| >= 1"));
    }
    if alpha.order() > v.order() {
        return Err(Error::invalid(format!("|α| = {} exceeds the weight's order {}", alpha.order(), v.order())));
    }
    if alpha.dim() != v.dim() {
        return Err(Error::invalid("α and v have different dimensions"));
    }
    Ok(())
}

/// Residual of `∫ f ∂^α(v^{|α|+1}φ) = (−1)^{|α|} ∫ v^{|α|+1} φ g` over the battery,
/// where `g` is the candidate `D_v^α f`.
pub fn weak_derivative_residual(
    f: &ScalarField,
    g: &ScalarField,
    v: &WeightFunction,
    alpha: &MultiIndex,
    battery: &TestFunctionBattery,
) -> Result<ResidualReport> {
    check_order(v, alpha)?;
    let k = alpha.order() as u32 + 1;
    let sign = if alpha.order().is_multiple_of(2) { 1.0 } else { -1.0 };
    let pairs = battery.pairings(
        |phi, x| {
            let d = weighted_bump_partial(v, k, phi, x, alpha);
            Ok(if d == 0.0 { 0.0 } else { f.value(x) * d })
        },
        |phi, x| {
            let p = phi.value(x);
            Ok(if p == 0.0 { 0.0 } else { sign * v.value(x).powi(k as i32) * p * g.value(x) })
        },
    )?;
    Ok(ResidualReport::from_pairs(pairs))
}

/// Residual of the weak-derivative identity for `F = v^{m+1} f` against the
/// classical candidate `Σ_{β≤α} C(α,β) D_v^β f ∂^{α−β} v^{m+1}`.
pub fn leibniz_residual(
    f: &ScalarField,
    v: &WeightFunction,
    m: usize,
    alpha: &MultiIndex,
    battery: &TestFunctionBattery,
) -> Result<ResidualReport> {
    if alpha.order() > m {
        return Err(Error::invalid(format!("|α| = {} exceeds m = {m}", alpha.order())));
    }
    check_order(v, alpha)?;
    let k = m as u32 + 1;
    let lower = alpha.lower_set();
    let dvf = lower.iter().map(|b| f.derivative(b)).collect::<Result<Vec<_>>>()?;
    let sign = if alpha.order().is_multiple_of(2) { 1.0 } else { -1.0 };
    let pairs = battery.pairings(
        |phi, x| {
            let d = phi.partial(x, alpha);
            Ok(if d == 0.0 { 0.0 } else { v.value(x).powi(k as i32) * f.value(x) * d })
        },
        |phi, x| {
            let p = phi.value(x);
            if p == 0.0 {
                return Ok(0.0);
            }
            let g: f64 =
                lower.iter().zip(&dvf).map(|(b, db)| alpha.binomial(b) * db(x) * power_partial(v, k, x, &alpha.sub(b))).sum();
            Ok(sign * g * p)
        },
    )?;
    Ok(ResidualReport::from_pairs(pairs))
}

/// Residual of `∫ h D^α(af) = −∫ a f D_v^α h` with `a = ṽ v³`, `|α| = 1`,
/// and `D^α(af) = f ∂^α a + a D_v^α f`. Integrated over the whole mesh.
#[allow(clippy::too_many_arguments)]
pub fn ibp_residual(
    h: &ScalarField,
    f: &ScalarField,
    v_tilde: &ScalarField,
    v: &WeightFunction,
    alpha: &MultiIndex,
    domain: &Domain,
    mesh: &Mesh,
    rule: &QuadratureRule,
) -> Result<ResidualReport> {
    if alpha.order() != 1 {
        return Err(Error::invalid("integration by parts is stated for |α| = 1"));
    }
    check_order(v, alpha)?;
    if !v.is_c1_bounded(domain) {
        return Err(Error::Hypothesis("v and its gradient must be bounded (v in C_b^1)".into()));
    }
    let dvt = v_tilde.derivative(alpha).map_err(|_| {
        Error::Hypothesis(format!("the factor a = v~ v^3 needs a declared bounded derivative of v~ along {alpha}"))
    })?;
    let (dh, df) = (h.derivative(alpha)?, f.derivative(alpha)?);
    let i = alpha.positions()[0];
    let a = |x: &[f64]| v_tilde.value(x) * v.value(x).powi(3);
    let da = |x: &[f64]| {
        let w = v.value(x);
        dvt(x) * w.powi(3) + v_tilde.value(x) * 3.0 * w * w * v.partial_positions(x, &[i])
    };
    let lhs = integrate(|x| h.value(x) * (f.value(x) * da(x) + a(x) * df(x)), mesh, rule)?;
    let rhs = integrate(|x| -a(x) * f.value(x) * dh(x), mesh, rule)?;
    Ok(ResidualReport::from_pairs(vec![(lhs, rhs)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_interval_mesh;

    fn setup() -> (Domain, TestFunctionBattery) {
        let dom = Domain::interval(-1.0, 1.0).unwrap();
        let mesh = build_interval_mesh(-1.0, 1.0, 16, 1.0, 0.0).unwrap();
        let bat = TestFunctionBattery::build(&dom, &mesh, vec![vec![0.0]], 1).unwrap();
        (dom, bat)
    }

    fn inverse_square() -> ScalarField {
        ScalarField::univariate(|x| x.powi(-2)).with_univariate_derivative(1, |x| -2.0 * x.powi(-3))
    }

    #[test]
    fn power_partials() {
        let v = WeightFunction::identity(3);
        // ∂²(x³) = 6x
        assert!((power_partial(&v, 3, &[0.5], &MultiIndex::new(vec![2])) - 3.0).abs() < 1e-14);
        assert_eq!(power_partial(&v, 1, &[0.5], &MultiIndex::new(vec![2])), 0.0);
    }

    #[test]
    fn inverse_square_weak_derivative() {
        let (_, bat) = setup();
        let v = WeightFunction::polynomial(vec![0.0, 0.0, 1.0], vec![0.0], 2);
        let f = inverse_square();
        let good = ScalarField::univariate(|x| -2.0 * x.powi(-3));
        let bad = ScalarField::univariate(|x| 2.0 * x.powi(-3));
        let a = MultiIndex::new(vec![1]);
        let r = weak_derivative_residual(&f, &good, &v, &a, &bat).unwrap();
        assert!(r.relative <= 1e-6, "{}", r.relative);
        assert!(weak_derivative_residual(&f, &bad, &v, &a, &bat).unwrap().relative >= 0.1);
    }

    #[test]
    fn smooth_fields_agree_with_classical_derivative() {
        let (_, bat) = setup();
        let v = WeightFunction::polynomial(vec![0.0, 0.0, 1.0], vec![0.0], 2);
        let f = ScalarField::univariate(f64::sin);
        let g = ScalarField::univariate(f64::cos);
        let r = weak_derivative_residual(&f, &g, &v, &MultiIndex::new(vec![1]), &bat).unwrap();
        assert!(r.relative <= 1e-6);
        let g2 = ScalarField::univariate(|x| -x.sin());
        let r = weak_derivative_residual(&f, &g2, &v, &MultiIndex::new(vec![2]), &bat).unwrap();
        assert!(r.relative <= 1e-6, "{}", r.relative);
    }

    #[test]
    fn leibniz_on_inverse_square() {
        let (_, bat) = setup();
        let v = WeightFunction::polynomial(vec![0.0, 0.0, 1.0], vec![0.0], 2);
        let r = leibniz_residual(&inverse_square(), &v, 1, &MultiIndex::new(vec![1]), &bat).unwrap();
        assert!(r.relative <= 1e-6);
        let corrupted = ScalarField::univariate(|x| x.powi(-2)).with_univariate_derivative(1, |x| -2.2 * x.powi(-3));
        let r = leibniz_residual(&corrupted, &v, 1, &MultiIndex::new(vec![1]), &bat).unwrap();
        assert!(r.relative >= 1e-2);
    }

    #[test]
    fn ibp_with_and_without_null_trace() {
        let dom = Domain::interval(-1.0, 1.0).unwrap();
        let mesh = build_interval_mesh(-1.0, 1.0, 256, 1.0, 0.0).unwrap();
        let rule = QuadratureRule::interval(5);
        let v = WeightFunction::polynomial(vec![0.0, 0.0, 1.0], vec![0.0], 2);
        let one = ScalarField::constant(1, 1.0);
        let a = MultiIndex::new(vec![1]);
        let bump = |c: f64| {
            let b = Bump { center: vec![c], radius: 0.6, amplitude: 1.0 };
            let b2 = b.clone();
            ScalarField::new(1, move |x| b.value(x))
                .with_derivative(MultiIndex::new(vec![1]), move |x| b2.partial(x, &MultiIndex::new(vec![1])))
        };
        let r = ibp_residual(&bump(0.1), &bump(-0.2), &one, &v, &a, &dom, &mesh, &rule).unwrap();
        assert!(r.relative <= 1e-8, "{r:?}");
        let zero = ScalarField::zero(1);
        assert_eq!(ibp_residual(&bump(0.1), &zero, &one, &v, &a, &dom, &mesh, &rule).unwrap().residual, 0.0);
        // h = e^x and f = cos(x/2) leave the boundary term [a f h] at ±1
        let h = ScalarField::univariate(f64::exp).with_univariate_derivative(1, f64::exp);
        let f = ScalarField::univariate(|x| (0.5 * x).cos()).with_univariate_derivative(1, |x| -0.5 * (0.5 * x).sin());
        let r = ibp_residual(&h, &f, &one, &v, &a, &dom, &mesh, &rule).unwrap();
        let boundary = 0.5f64.cos() * (1f64.exp() - (-1f64).exp());
        assert!((r.residual - boundary).abs() < 1e-10);
        assert!(r.relative >= 1e-3);
    }
}
