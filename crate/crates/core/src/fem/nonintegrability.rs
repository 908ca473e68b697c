use super::coeffs::{Coefficient, CoefficientSet};
use crate::error::{Error, Result};
use crate::geometry::{integrate_radial, Domain, DEFAULT_ORDER};
use crate::weights::{HypothesisKind, HypothesisReport};

/// Sub-flags of the hypotheses under which every weak solution fails to be
/// locally integrable.
#[derive(Debug, Clone, PartialEq)]
pub struct NonintegrabilityReport {
    /// `a_ij ∈ 𝒞¹ ∩ L^∞_{v⁻⁴}` with `∂a_ij ∈ L^∞_{v⁻³,loc}`.
    pub diffusion: bool,
    /// `b_i ∈ 𝒞¹ ∩ L^∞_{v⁻³}` with `∂b_i ∈ L^∞_{v⁻²,loc}`.
    pub drift: bool,
    /// `c ∈ L^∞_{v⁻²}`.
    pub reaction: bool,
    /// `k ≥ 0`.
    pub load_nonnegative: bool,
    /// `k ∈ L²_{v⁻¹}`.
    pub load_dual: bool,
    /// `kv⁻² ∉ L¹_loc`.
    pub load_nonintegrable: bool,
    pub details: Vec<String>,
}

impl NonintegrabilityReport {
    /// The load hypothesis: all three load sub-flags.
    pub fn load(&self) -> bool {
        self.load_nonnegative && self.load_dual && self.load_nonintegrable
    }

    pub fn holds(&self) -> bool {
        self.diffusion && self.drift && self.reaction && self.load()
    }

    /// When all hypotheses hold, the solution is not locally integrable.
    pub fn conclusion(&self) -> bool {
        self.holds()
    }

    pub fn to_hypothesis_report(&self) -> HypothesisReport {
        HypothesisReport {
            kind: HypothesisKind::Nonintegrability,
            holds: self.holds(),
            witness: None,
            constant: None,
            details: self.details.clone(),
        }
    }
}

fn radial(c: &Coefficient, what: &str) -> Result<(f64, f64)> {
    c.radial_form()
        .ok_or_else(|| Error::invalid(format!("{what} must be a constant or a radial power for the non-integrability check")))
}

/// `scale·|x|^e` times `v^m = |x|^{mβ}`: bounded by `v^m` near the origin,
/// `𝒞¹`, and with gradient bounded by `v^{m−1}`.
fn scaled_power_ok(scale: f64, e: f64, beta: f64, m: f64) -> (bool, bool, bool) {
    if scale == 0.0 {
        return (true, true, true);
    }
    let total = m * beta + e;
    let bounded = e >= 0.0;
    let c1 = total == 0.0 || total > 1.0;
    let grad = total == 0.0 || total - 1.0 - (m - 1.0) * beta >= 0.0;
    (bounded, c1, grad)
}

fn radius_of(domain: &Domain) -> Result<f64> {
    match *domain {
        Domain::Ball { radius, .. } => Ok(radius),
        Domain::Interval { a, b } => Ok(a.abs().max(b.abs())),
        Domain::Square { a, b } => Ok(2f64.sqrt() * a.abs().max(b.abs())),
    }
}

/// Checks the hypotheses by exponent arithmetic for coefficients of the form
/// `a = v⁴ã`, `b = v³b̃`, `c = v²c̃` with `v = |x|^β` and constant or radial
/// power `ã, b̃, c̃, k`; the load integrals are tested with radial quadrature.
pub fn nonintegrability_check(coeffs: &CoefficientSet, domain: &Domain) -> Result<NonintegrabilityReport> {
    coeffs.validate()?;
    let d = coeffs.dim();
    if domain.dim() != d {
        return Err(Error::invalid("domain and coefficient dimensions differ"));
    }
    let beta = coeffs
        .weight_exponent()
        .ok_or_else(|| Error::invalid("the weight must be a radial power for the non-integrability check"))?;
    let mut details = Vec::new();

    let mut diffusion = true;
    for (i, row) in coeffs.a_tilde.iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            let (s, e) = radial(a, "a_tilde")?;
            let (b, c1, g) = scaled_power_ok(s, e, beta, 4.0);
            if !(b && c1 && g) {
                diffusion = false;
                details.push(format!("a_{i}{j} = {s}|x|^{} fails (bounded {b}, C1 {c1}, gradient {g})", 4.0 * beta + e));
            }
        }
    }
    let mut drift = true;
    for (i, bt) in coeffs.b_tilde.iter().enumerate() {
        let (s, e) = radial(bt, "b_tilde")?;
        let (b, c1, g) = scaled_power_ok(s, e, beta, 3.0);
        if !(b && c1 && g) {
            drift = false;
            details.push(format!("b_{i} = {s}|x|^{} fails (bounded {b}, C1 {c1}, gradient {g})", 3.0 * beta + e));
        }
    }
    let (cs, ce) = radial(&coeffs.c_tilde, "c_tilde")?;
    let reaction = cs == 0.0 || ce >= 0.0;
    if !reaction {
        details.push(format!("c v^-2 = {cs}|x|^{ce} is unbounded"));
    }

    let (ks, ke) = radial(&coeffs.k, "k")?;
    let load_nonnegative = ks >= 0.0;
    if !load_nonnegative {
        details.push(format!("k = {ks}|x|^{ke} is negative"));
    }
    let radius = radius_of(domain)?;
    let dual = integrate_radial(|r| (ks * r.powf(ke - beta)).powi(2), d, radius, DEFAULT_ORDER)?;
    let load_dual = !dual.is_divergent();
    details.push(match dual.value() {
        Some(v) => format!("int (k/v)^2 = {v:e} is finite"),
        None => "int (k/v)^2 diverges".into(),
    });
    let local = integrate_radial(|r| (ks * r.powf(ke - 2.0 * beta)).abs(), d, radius, DEFAULT_ORDER)?;
    let load_nonintegrable = ks != 0.0 && local.is_divergent();
    details.push(match local.value() {
        Some(v) => format!("int k v^-2 = {v:e} is finite near the origin: k v^-2 is locally integrable"),
        None => "int k v^-2 diverges near the origin".into(),
    });
    Ok(NonintegrabilityReport { diffusion, drift, reaction, load_nonnegative, load_dual, load_nonintegrable, details })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flagship_instance_holds() {
        let s = CoefficientSet::power_example(2, 1, 0.5);
        let r = nonintegrability_check(&s, &Domain::disk(1.0).unwrap()).unwrap();
        assert!(r.holds() && r.conclusion(), "{:?}", r.details);
    }

    #[test]
    fn negative_beta_loses_nonintegrability() {
        let s = CoefficientSet::power_example(2, 1, -0.5);
        let r = nonintegrability_check(&s, &Domain::disk(1.0).unwrap()).unwrap();
        assert!(r.diffusion && r.drift && r.reaction && r.load_nonnegative && r.load_dual);
        assert!(!r.load_nonintegrable);
        assert!(!r.holds());
    }

    #[test]
    fn negative_load_fails() {
        let mut s = CoefficientSet::power_example(2, 1, 0.5);
        s.k = Coefficient::Constant(-1.0);
        let r = nonintegrability_check(&s, &Domain::disk(1.0).unwrap()).unwrap();
        assert!(!r.load_nonnegative);
    }

    #[test]
    fn general_functions_are_rejected() {
        let mut s = CoefficientSet::power_example(2, 1, 0.5);
        s.k = Coefficient::function(|_| 1.0);
        assert!(matches!(nonintegrability_check(&s, &Domain::disk(1.0).unwrap()), Err(Error::InvalidArgument(_))));
    }
}
