use super::field::ScalarField;
use crate::cutoff::{chi_eval, CutoffFamily};
use crate::error::{Error, Result};
use crate::geometry::{integrate_checked, Mesh, QuadratureRule, RadialIntegral};
use crate::multi_index::MultiIndex;
use crate::weights::{WeightFamily, WeightFunction};

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("p must lie in [1, inf), got {p}")))
    }
}

fn to_norm(i: RadialIntegral, p: f64) -> f64 {
    match i {
        RadialIntegral::Finite(v) => v.max(0.0).powf(1.0 / p),
        RadialIntegral::Divergent(_) => f64::INFINITY,
    }
}

/// `‖f‖_{L^p_w} = ‖f w‖_{L^p}`; `+∞` when the integral is detected to diverge.
pub fn weighted_norm(f: &ScalarField, w: &WeightFunction, p: f64, mesh: &Mesh, rule: &QuadratureRule) -> Result<f64> {
    check_p(p)?;
    let i = integrate_checked(|x| (f.value(x) * w.value(x)).abs().powf(p), mesh, rule)?;
    Ok(to_norm(i, p))
}

/// `(Σ_{|α|≤m} ‖D_v^α f‖^p_{L^p_{w_α}})^{1/p}` with the declared derivatives of `f`.
pub fn sobolev_norm(f: &ScalarField, family: &WeightFamily, mesh: &Mesh, rule: &QuadratureRule) -> Result<f64> {
    let p = family.p();
    check_p(p)?;
    let mut terms = Vec::new();
    for alpha in family.indices() {
        let d = f.derivative(alpha)?;
        terms.push((alpha.clone(), d));
    }
    let i = integrate_checked(
        |x| {
            terms
                .iter()
                .map(|(a, d)| match family.weight(a, x) {
                    Ok(w) => (d(x) * w).abs().powf(p),
                    Err(_) => f64::NAN,
                })
                .sum()
        },
        mesh,
        rule,
    )?;
    Ok(to_norm(i, p))
}

/// `‖f − χ_n f‖_{W^{m,p}_{s,v}}` for each `n`, with
/// `D_v^α(χ_n f) = Σ_{β≤α} C(α,β) ∂^{α−β}χ_n D_v^β f`.
pub fn density_sequence(
    f: &ScalarField,
    family: &WeightFamily,
    n_list: &[usize],
    mesh: &Mesh,
    rule: &QuadratureRule,
) -> Result<Vec<(usize, f64)>> {
    let p = family.p();
    check_p(p)?;
    let indices: Vec<MultiIndex> = family.indices().cloned().collect();
    for a in &indices {
        f.derivative(a)?;
    }
    let base = CutoffFamily::new(family.base().clone(), n_list.first().copied().unwrap_or(1))?;
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let chi = base.with_n(n)?;
        let integrand = |x: &[f64]| -> f64 {
            let mut s = 0.0;
            for a in &indices {
                let mut prod = 0.0;
                for b in a.lower_set() {
                    let c = match chi_eval(&chi, x, &a.sub(&b)) {
                        Ok(c) => c,
                        Err(_) => return f64::NAN,
                    };
                    if c != 0.0 {
                        prod += a.binomial(&b) * c * f.eval_derivative(&b, x).unwrap_or(f64::NAN);
                    }
                }
                let diff = f.eval_derivative(a, x).unwrap_or(f64::NAN) - prod;
                if diff != 0.0 {
                    s += (diff * family.weight(a, x).unwrap_or(f64::NAN)).abs().powf(p);
                }
            }
            s
        };
        let i = integrate_checked(integrand, mesh, rule)?;
        out.push((n, to_norm(i, p)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_interval_mesh;
    use crate::weights::ShapeMap;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn rule() -> QuadratureRule {
        QuadratureRule::interval(5)
    }

    #[test]
    fn weighted_norm_examples() {
        let mesh = build_interval_mesh(-1.0, 1.0, 64, 3.0, 0.0).unwrap();
        let w = WeightFunction::polynomial(vec![0.0, 0.0, 1.0], vec![0.0], 2);
        let f = ScalarField::univariate(|x| x.powi(-2));
        assert_relative_eq!(weighted_norm(&f, &w, 2.0, &mesh, &rule()).unwrap(), 2f64.sqrt(), max_relative = 1e-6);
        assert_eq!(weighted_norm(&ScalarField::zero(1), &w, 2.0, &mesh, &rule()).unwrap(), 0.0);
        let unit = build_interval_mesh(0.0, 1.0, 8, 1.0, 0.0).unwrap();
        let f = ScalarField::univariate(|x| x);
        assert_relative_eq!(
            weighted_norm(&f, &WeightFunction::one(1), 2.0, &unit, &rule()).unwrap(),
            (1.0f64 / 3.0).sqrt(),
            max_relative = 1e-12
        );
        let f = ScalarField::univariate(|x| x.powi(-3));
        assert_eq!(weighted_norm(&f, &WeightFunction::identity(1), 2.0, &mesh, &rule()).unwrap(), f64::INFINITY);
        assert!(weighted_norm(&f, &w, 0.5, &mesh, &rule()).is_err());
    }

    #[test]
    fn sobolev_norm_examples() {
        let unit = build_interval_mesh(0.0, 1.0, 32, 1.0, 0.0).unwrap();
        let fam = WeightFamily::from_shape(WeightFunction::one(1), ShapeMap::abs(1, 1), 1, 2.0).unwrap();
        let f = ScalarField::univariate(|x| (PI * x).sin()).with_univariate_derivative(1, |x| PI * (PI * x).cos());
        assert_relative_eq!(
            sobolev_norm(&f, &fam, &unit, &rule()).unwrap(),
            ((1.0 + PI * PI) / 2.0).sqrt(),
            max_relative = 1e-10
        );

        let v = WeightFunction::polynomial(vec![0.0, 0.0, 1.0], vec![0.0], 2);
        let fam = WeightFamily::from_shape(v, ShapeMap::abs(1, 1), 1, 2.0).unwrap();
        let f = ScalarField::univariate(|x| x.powi(-2)).with_univariate_derivative(1, |x| -2.0 * x.powi(-3));
        let mesh = build_interval_mesh(-1.0, 1.0, 64, 3.0, 0.0).unwrap();
        let fine = build_interval_mesh(-1.0, 1.0, 512, 3.0, 0.0).unwrap();
        let a = sobolev_norm(&f, &fam, &mesh, &rule()).unwrap();
        let b = sobolev_norm(&f, &fam, &fine, &rule()).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-4);
        // ∫ x^{-4} x^4 + ∫ 4 x^{-6} x^8 = 2 + 8/3
        assert_relative_eq!(b, (2.0f64 + 8.0 / 3.0).sqrt(), max_relative = 1e-8);
        assert!(sobolev_norm(&ScalarField::univariate(|x| x), &fam, &mesh, &rule()).is_err());
    }

    #[test]
    fn density_decreases() {
        let fam = WeightFamily::from_shape(WeightFunction::identity(1), ShapeMap::abs(1, 1), 1, 2.0).unwrap();
        let mesh = build_interval_mesh(-1.0, 1.0, 4096, 1.0, 0.0).unwrap();
        let seq = density_sequence(&ScalarField::constant(1, 1.0), &fam, &[4, 8, 16, 32, 64], &mesh, &rule()).unwrap();
        assert!(seq.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(seq[4].1 <= 0.5 * seq[0].1);
        // ‖1 − χ_n‖² ∝ n^{-3}
        let ratio = seq[3].1 / seq[4].1;
        assert_relative_eq!(ratio, 2f64.powf(1.5), max_relative = 1e-3);
    }
}
