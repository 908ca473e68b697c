use crate::error::{Error, Result};
use std::f64::consts::PI;

/// A bounded open set `Ω`.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// `(a, b) ⊂ ℝ`.
    Interval { a: f64, b: f64 },
    /// The open ball `{|x| < radius}` in `ℝ^dim`; `dim = 2` is the disk.
    Ball { radius: f64, dim: usize },
    /// `(a, b)²`.
    Square { a: f64, b: f64 },
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        let d = Domain::Interval { a, b };
        d.validate()?;
        Ok(d)
    }

    pub fn disk(radius: f64) -> Result<Self> {
        Self::ball(radius, 2)
    }

    pub fn ball(radius: f64, dim: usize) -> Result<Self> {
        let d = Domain::Ball { radius, dim };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Domain::Interval { a, b } | Domain::Square { a, b } if !(a < b) => {
                Err(Error::invalid(format!("domain needs a < b, got ({a}, {b})")))
            }
            Domain::Ball { radius, .. } if !(radius > 0.0) => {
                Err(Error::invalid(format!("ball radius must be positive, got {radius}")))
            }
            Domain::Ball { dim: 0, .. } => Err(Error::invalid("ball dimension must be >= 1")),
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Domain::Interval { .. } => 1,
            Domain::Ball { dim, .. } => dim,
            Domain::Square { .. } => 2,
        }
    }

    /// Lebesgue measure of the domain.
    pub fn measure(&self) -> f64 {
        match *self {
            Domain::Interval { a, b } => b - a,
            Domain::Square { a, b } => (b - a) * (b - a),
            Domain::Ball { radius, dim } => sphere_area(dim) * radius.powi(dim as i32) / dim as f64,
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            Domain::Interval { a, b } => b - a,
            Domain::Square { a, b } => (b - a) * std::f64::consts::SQRT_2,
            Domain::Ball { radius, .. } => 2.0 * radius,
        }
    }

    /// Width of the thinnest slab containing the domain; the constant in the
    /// one-directional Poincaré bound `‖u‖ ≤ width·‖∂₁u‖` on `W₀^{1,p}`.
    pub fn width(&self) -> f64 {
        match *self {
            Domain::Interval { a, b } | Domain::Square { a, b } => b - a,
            Domain::Ball { radius, .. } => 2.0 * radius,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            Domain::Interval { a, b } => x[0] > a && x[0] < b,
            Domain::Square { a, b } => x.iter().all(|&c| c > a && c < b),
            Domain::Ball { radius, .. } => norm2(x) < radius,
        }
    }

    /// Euclidean distance from an interior point to the boundary.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match *self {
            Domain::Interval { a, b } => (x[0] - a).min(b - x[0]),
            Domain::Square { a, b } => x.iter().map(|&c| (c - a).min(b - c)).fold(f64::INFINITY, f64::min),
            Domain::Ball { radius, .. } => radius - norm2(x),
        }
    }

    /// Points of `∂Ω` for one-dimensional domains.
    pub fn endpoints(&self) -> Option<[f64; 2]> {
        match *self {
            Domain::Interval { a, b } => Some([a, b]),
            _ => None,
        }
    }

    /// Whether `x` lies in the closure of the domain.
    pub fn closure_contains(&self, x: &[f64]) -> bool {
        const TOL: f64 = 1e-12;
        match *self {
            Domain::Interval { a, b } => x[0] >= a - TOL && x[0] <= b + TOL,
            Domain::Square { a, b } => x.iter().all(|&c| c >= a - TOL && c <= b + TOL),
            Domain::Ball { radius, .. } => norm2(x) <= radius + TOL,
        }
    }
}

/// A compact set `K ⋐ Ω` used to localise hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub enum CompactSet {
    Empty,
    /// `[lo, hi]` in one dimension.
    Interval {
        lo: f64,
        hi: f64,
    },
    /// Closed centred ball `{|x| ≤ radius}`.
    Ball {
        radius: f64,
    },
}

impl CompactSet {
    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            CompactSet::Empty => false,
            CompactSet::Interval { lo, hi } => x[0] >= lo && x[0] <= hi,
            CompactSet::Ball { radius } => norm2(x) <= radius,
        }
    }

    /// Whether `x` lies in the interior of the set; points outside the interior
    /// belong to the closure of the complement.
    pub fn interior_contains(&self, x: &[f64]) -> bool {
        match *self {
            CompactSet::Empty => false,
            CompactSet::Interval { lo, hi } => x[0] > lo && x[0] < hi,
            CompactSet::Ball { radius } => norm2(x) < radius,
        }
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Surface area of the unit sphere `S^{d−1}`: `2π^{d/2} / Γ(d/2)`.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / libm::tgamma(h)
}

/// `∫_{S^{d−1}} Σ_i |θ_i|^p dθ`, the angular factor of a componentwise
/// `ℓ^p` gradient norm of a radial field. Equals `sphere_area(d)` at `p = 2`.
pub fn sphere_lp_moment(d: usize, p: f64) -> f64 {
    if d == 1 {
        return 2.0;
    }
    let dd = d as f64;
    d as f64 * 2.0 * PI.powf((dd - 1.0) / 2.0) * libm::tgamma((p + 1.0) / 2.0) / libm::tgamma((dd + p) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(Domain::ball(1.0, 3).unwrap().measure(), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(Domain::disk(2.0).unwrap().measure(), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(1), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn lp_moment_reduces_to_area_at_two() {
        for d in [2, 3, 5, 12] {
            assert_relative_eq!(sphere_lp_moment(d, 2.0), sphere_area(d), max_relative = 1e-12);
        }
        // d = 2, p = 1: ∫(|cos|+|sin|) dθ = 8
        assert_relative_eq!(sphere_lp_moment(2, 1.0), 8.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_degenerate_domains() {
        assert!(Domain::interval(1.0, 1.0).is_err());
        assert!(Domain::disk(0.0).is_err());
    }
}
