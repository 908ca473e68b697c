//! Browser bindings for three degenera operations. Every function returns a
//! flat `Float64Array` so the page needs no glue beyond the generated module.
//! The `*_values` functions hold the logic and also run natively.

use degenera::calculus::{inequality_check, random_radial_polynomial, InequalityKind, InequalitySetup};
use degenera::cutoff::CutoffFamily;
use degenera::fem::{assemble, solve, CoefficientSet, FESpace, SolverMethod};
use degenera::geometry::{build_disk_mesh, Domain, QuadratureRule, DEFAULT_ORDER};
use degenera::multi_index::MultiIndex;
use degenera::weights::WeightFunction;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

/// `[x, χ_n(x), χ_n'(x), ...]` on `samples` points of (−1, 1) for the
/// cutoff built from `v(x) = |x|^exponent`.
pub fn cutoff_values(exponent: f64, n: usize, samples: usize) -> Result<Vec<f64>, String> {
    if samples < 2 {
        return Err("need at least two samples".into());
    }
    let v = WeightFunction::radial_power(exponent, 1, 1);
    let family = CutoffFamily::new(v, n).map_err(|e| e.to_string())?;
    let (d0, d1) = (MultiIndex::new(vec![0]), MultiIndex::new(vec![1]));
    let mut out = Vec::with_capacity(3 * samples);
    for i in 0..samples {
        // interior points only: the weight may vanish at the ends' images
        let x = -1.0 + 2.0 * (i as f64 + 0.5) / samples as f64;
        out.push(x);
        out.push(family.eval(&[x], &d0).map_err(|e| e.to_string())?);
        out.push(family.eval(&[x], &d1).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

/// `[lhs, rhs, constant, margin, ...]` for `samples` seeded random radial
/// functions on the unit ball in `d` dimensions. `kind` is "hardy" or
/// "kebiche"; the latter uses `v = |x|^beta`.
pub fn margin_values(kind: &str, d: usize, p: f64, beta: f64, samples: usize, seed: u64) -> Result<Vec<f64>, String> {
    let kind = match kind {
        "hardy" => InequalityKind::Hardy,
        "kebiche" => InequalityKind::Kebiche,
        _ => return Err(format!("unknown inequality '{kind}'")),
    };
    let domain = Domain::ball(1.0, d).map_err(|e| e.to_string())?;
    let setup = InequalitySetup { kind, p, domain, sigma: None, c_omega: None };
    let v = WeightFunction::radial_power(beta, d, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(4 * samples);
    for _ in 0..samples {
        let f = random_radial_polynomial(&mut rng, 1.0, 4);
        let r = inequality_check(&setup, &v, &f).map_err(|e| e.to_string())?;
        out.extend([r.lhs, r.rhs, r.constant_used, r.margin]);
    }
    Ok(out)
}

/// Solves `−div(|x|^{8m}∇f) + |x|^{4m} f = |x|^{2m−β}` with `m = 1` on the
/// unit disk. Returns `[energy, mass in |x| < 1/4, r_0, f_0, r_1, f_1, ...]`
/// with the profile read along the positive x axis.
pub fn flagship_values(rings: usize, sectors: usize, beta: f64) -> Result<Vec<f64>, String> {
    let err = |e: degenera::error::Error| e.to_string();
    let coeffs = CoefficientSet::power_example(2, 1, beta);
    let space = FESpace::new(build_disk_mesh(1.0, rings, sectors, 3.0).map_err(err)?).map_err(err)?;
    let rule = QuadratureRule::triangle(DEFAULT_ORDER);
    let sys = assemble(&coeffs, &space, &rule).map_err(err)?;
    let rep = solve(&sys, SolverMethod::Auto, 1e-10, 50 * space.num_dofs() + 1000).map_err(err)?;
    let mass = space.local_mass(&rep.solution, &[0.0, 0.0], 0.25, &rule).map_err(err)?;
    let mesh = space.mesh();
    let mut ray: Vec<(f64, f64)> = (0..mesh.num_nodes())
        .filter_map(|i| {
            let x = mesh.node(i);
            (x[1].abs() < 1e-12 && x[0] >= 0.0).then(|| (x[0], space.dof(i).map_or(0.0, |k| rep.solution[k])))
        })
        .collect();
    ray.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = vec![rep.energy_norm, mass];
    out.extend(ray.into_iter().flat_map(|(r, f)| [r, f]));
    Ok(out)
}

#[wasm_bindgen]
pub fn cutoff_curve(exponent: f64, n: usize, samples: usize) -> Result<Vec<f64>, JsError> {
    cutoff_values(exponent, n, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn inequality_margin(kind: &str, d: usize, p: f64, beta: f64, samples: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    margin_values(kind, d, p, beta, samples, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn flagship_profile(rings: usize, sectors: usize, beta: f64) -> Result<Vec<f64>, JsError> {
    flagship_values(rings, sectors, beta).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_is_a_unit_plateau_away_from_the_zero() {
        let c = cutoff_values(1.0, 8, 40).unwrap();
        assert_eq!(c.len(), 120);
        for t in c.chunks(3) {
            assert!((0.0..=1.0).contains(&t[1]));
            if t[0].abs() > 0.5 {
                assert_eq!(t[1], 1.0);
            }
        }
        // χ_n vanishes next to the zero of v
        let mid = &c[57..60];
        assert!(mid[0].abs() < 0.05 && mid[1] == 0.0, "{mid:?}");
    }

    #[test]
    fn margins_are_nonnegative() {
        let m = margin_values("kebiche", 12, 2.0, 2.0, 5, 1).unwrap();
        assert!(m.chunks(4).all(|r| r[3] >= 0.0 && (r[2] - 4.0).abs() < 1e-12));
        let h = margin_values("hardy", 3, 2.0, 0.0, 5, 1).unwrap();
        assert!(h.chunks(4).all(|r| r[3] >= 0.0));
    }

    #[test]
    fn window_violation_is_an_error() {
        let e = margin_values("kebiche", 3, 2.0, 2.0, 1, 1).unwrap_err();
        assert!(e.contains("dimension window"), "{e}");
    }

    #[test]
    fn flagship_profile_peaks_at_the_origin() {
        let f = flagship_values(16, 16, 0.5).unwrap();
        assert!(f[0] > 1.0 && f[1] > 0.0);
        let profile: Vec<_> = f[2..].chunks(2).collect();
        assert_eq!(profile[0][0], 0.0);
        assert_eq!(profile.last().unwrap()[1], 0.0);
        assert!(profile.windows(2).all(|w| w[1][1] <= w[0][1]));
    }
}
