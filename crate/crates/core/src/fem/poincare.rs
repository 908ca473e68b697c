use super::assemble::weighted_pair;
use super::solve::{cg, dense_lu, DENSE_LIMIT};
use super::space::FESpace;
use super::sparse::{dot, CsrMatrix};
use crate::error::{Error, Result};
use crate::geometry::QuadratureRule;
use crate::weights::WeightFunction;

pub const POINCARE_TOL: f64 = 1e-8;
const MAX_POWER_STEPS: usize = 500;

/// Discrete constant in `‖v²f‖_{L²} ≤ C‖v²∇f‖_{L²}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareEstimate {
    /// `1/√λ_min`.
    pub constant: f64,
    /// Smallest generalized eigenvalue of `(S, Q)`.
    pub lambda_min: f64,
    pub iterations: usize,
}

fn solve_spd(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if a.dim() < DENSE_LIMIT {
        dense_lu(a, b)
    } else {
        Ok(cg(a, b, 1e-12, 20 * a.dim())?.0)
    }
}

/// Inverse power iteration with zero shift on `S x = λ Q x`, where
/// `S = ∫v⁴∇φ·∇ψ` and `Q = ∫v⁴φψ`, started from the all-ones vector.
pub fn estimate_poincare(space: &FESpace, v: &WeightFunction, rule: &QuadratureRule) -> Result<PoincareEstimate> {
    let (s, q) = weighted_pair(space, v, rule)?;
    let mut x = vec![1.0; space.num_dofs()];
    let mut lambda = f64::INFINITY;
    for it in 1..=MAX_POWER_STEPS {
        let y = solve_spd(&s, &q.matvec(&x))?;
        let qn = q.bilinear(&y, &y);
        if !(qn > 0.0) {
            return Err(Error::NonConvergence { iterations: it, residual: f64::NAN });
        }
        let new = dot(&y, &s.matvec(&y)) / qn;
        let scale = qn.sqrt();
        x = y.into_iter().map(|yi| yi / scale).collect();
        if (new - lambda).abs() <= POINCARE_TOL * new {
            return Ok(PoincareEstimate { constant: 1.0 / new.sqrt(), lambda_min: new, iterations: it });
        }
        lambda = new;
    }
    Err(Error::NonConvergence { iterations: MAX_POWER_STEPS, residual: f64::NAN })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_interval_mesh;
    use std::f64::consts::PI;

    fn estimate(b: f64, n: usize) -> f64 {
        let space = FESpace::new(build_interval_mesh(0.0, b, n, 1.0, 0.0).unwrap()).unwrap();
        estimate_poincare(&space, &WeightFunction::one(1), &QuadratureRule::interval(3)).unwrap().constant
    }

    #[test]
    fn unit_interval_is_one_over_pi() {
        let c = estimate(1.0, 128);
        assert!((c * PI - 1.0).abs() < 0.01, "{c}");
    }

    #[test]
    fn scales_with_length() {
        let c = estimate(2.0, 128);
        assert!((c - 2.0 / PI).abs() < 0.01 * 2.0 / PI);
    }

    #[test]
    fn matches_discrete_eigenvalue() {
        // P1 on a uniform mesh: λ_h = (6/h²)(1 − cos πh)/(2 + cos πh).
        let h = 1.0 / 32.0;
        let lam = 6.0 / (h * h) * (1.0 - (PI * h).cos()) / (2.0 + (PI * h).cos());
        let c = estimate(1.0, 32);
        assert!((c - 1.0 / lam.sqrt()).abs() < 1e-7);
    }
}
