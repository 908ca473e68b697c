use crate::error::{Error, Result};
use crate::geometry::{gauss_legendre, norm2, Domain, Mesh};
use crate::jet::{exp_neg_recip, Jet, JET_LEN};
use crate::multi_index::MultiIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Highest derivative order available from a bump.
pub const MAX_BUMP_ORDER: usize = JET_LEN - 1;

/// `a · Π_i b((x_i − c_i)/ρ)` with `b(t) = exp(−1/(1−t²))` on `|t| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub amplitude: f64,
}

impl Bump {
    fn axis(&self, t: f64, i: usize) -> [f64; JET_LEN] {
        let s = (Jet::variable(t) - Jet::constant(self.center[i])).scale(1.0 / self.radius);
        exp_neg_recip(Jet::constant(1.0) - s * s).derivatives()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.partial(x, &MultiIndex::zero(x.len()))
    }

    /// `∂^α φ(x)`, exactly via Taylor arithmetic per axis.
    pub fn partial(&self, x: &[f64], alpha: &MultiIndex) -> f64 {
        let mut p = self.amplitude;
        for (i, (&xi, &a)) in x.iter().zip(alpha.components()).enumerate() {
            if p == 0.0 {
                break;
            }
            p *= self.axis(xi, i)[a];
        }
        p
    }

    pub fn support(&self) -> Vec<(f64, f64)> {
        self.center.iter().map(|&c| (c - self.radius, c + self.radius)).collect()
    }
}

/// Localised smooth test functions: bumps at every cell centre of a mesh at
/// three scales, with seeded random amplitudes.
#[derive(Debug, Clone)]
pub struct TestFunctionBattery {
    pub bumps: Vec<Bump>,
    /// Points where integrands may be singular; the support integration splits there.
    pub singular: Vec<Vec<f64>>,
    pub subcells: usize,
    pub order: usize,
}

/// Bump radii as multiples of the local cell size.
pub const BUMP_SCALES: [f64; 3] = [1.0, 2.0, 4.0];

impl TestFunctionBattery {
    pub fn build(domain: &Domain, mesh: &Mesh, singular: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bumps = Vec::new();
        let d = mesh.dim();
        for c in 0..mesh.num_cells() {
            let verts = mesh.cell(c);
            let center: Vec<f64> =
                (0..d).map(|k| verts.iter().map(|&v| mesh.node(v)[k]).sum::<f64>() / verts.len() as f64).collect();
            let h = mesh.cell_measure(c).powf(1.0 / d as f64);
            // the support box must lie in Ω: room is the boundary distance over the box half-diagonal factor
            let room = domain.boundary_distance(&center) / (d as f64).sqrt();
            for s in BUMP_SCALES {
                let radius = (s * h).min(0.999 * room);
                let amplitude = rng.random_range(0.5..1.5);
                if radius > 1e-3 * h {
                    bumps.push(Bump { center: center.clone(), radius, amplitude });
                }
            }
        }
        if bumps.is_empty() {
            return Err(Error::invalid("test-function battery is empty"));
        }
        Ok(Self::from_bumps(bumps, singular))
    }

    /// A battery from explicit bumps.
    pub fn from_bumps(bumps: Vec<Bump>, singular: Vec<Vec<f64>>) -> Self {
        let one_d = bumps.first().is_none_or(|b| b.center.len() == 1);
        let (subcells, order) = if one_d { (64, 8) } else { (24, 6) };
        TestFunctionBattery { bumps, singular, subcells, order }
    }

    pub fn len(&self) -> usize {
        self.bumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bumps.is_empty()
    }

    /// Break points of `[lo, hi]`: the ends plus singular coordinates inside.
    fn breaks(&self, lo: f64, hi: f64, axis: usize) -> Vec<f64> {
        let mut b = vec![lo, hi];
        b.extend(self.singular.iter().map(|z| z[axis]).filter(|&z| z > lo && z < hi));
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    fn axis_nodes(&self, lo: f64, hi: f64, axis: usize) -> (Vec<f64>, Vec<f64>) {
        let (gx, gw) = gauss_legendre(self.order);
        let br = self.breaks(lo, hi, axis);
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        for piece in br.windows(2) {
            let (a, b) = (piece[0], piece[1]);
            let n = ((self.subcells as f64 * (b - a) / (hi - lo)).ceil() as usize).max(4);
            let h = (b - a) / n as f64;
            for k in 0..n {
                let a0 = a + k as f64 * h;
                for (x, w) in gx.iter().zip(&gw) {
                    xs.push(a0 + 0.5 * h * (x + 1.0));
                    ws.push(0.5 * h * w);
                }
            }
        }
        (xs, ws)
    }

    /// `∫ f` over the support box of bump `j` by tensor Gauss on subcells
    /// split at the singular points.
    pub fn integrate_on_support(&self, j: usize, f: impl Fn(&[f64]) -> f64) -> Result<f64> {
        let supp = self.bumps[j].support();
        let axes: Vec<(Vec<f64>, Vec<f64>)> = supp.iter().enumerate().map(|(i, &(lo, hi))| self.axis_nodes(lo, hi, i)).collect();
        let mut total = 0.0;
        match axes.len() {
            1 => {
                for (x, w) in axes[0].0.iter().zip(&axes[0].1) {
                    total += w * checked(&f, &[*x], j)?;
                }
            }
            2 => {
                for (x, wx) in axes[0].0.iter().zip(&axes[0].1) {
                    let mut row = 0.0;
                    for (y, wy) in axes[1].0.iter().zip(&axes[1].1) {
                        row += wy * checked(&f, &[*x, *y], j)?;
                    }
                    total += wx * row;
                }
            }
            d => return Err(Error::invalid(format!("battery integration supports d <= 2, got {d}"))),
        }
        Ok(total)
    }

    /// `(L_j, R_j)` for every bump, in bump order.
    pub fn pairings<L, R>(&self, lhs: L, rhs: R) -> Result<Vec<(f64, f64)>>
    where
        L: Fn(&Bump, &[f64]) -> Result<f64> + Sync,
        R: Fn(&Bump, &[f64]) -> Result<f64> + Sync,
    {
        (0..self.bumps.len())
            .into_par_iter()
            .map(|j| {
                let b = &self.bumps[j];
                let err = std::cell::Cell::new(None);
                let wrap = |g: &dyn Fn(&Bump, &[f64]) -> Result<f64>, x: &[f64]| match g(b, x) {
                    Ok(v) => v,
                    Err(e) => {
                        err.set(Some(e));
                        f64::NAN
                    }
                };
                let l = self.integrate_on_support(j, |x| wrap(&lhs, x));
                if let Some(e) = err.take() {
                    return Err(e);
                }
                let r = self.integrate_on_support(j, |x| wrap(&rhs, x));
                if let Some(e) = err.take() {
                    return Err(e);
                }
                Ok((l?, r?))
            })
            .collect()
    }
}

fn checked(f: &impl Fn(&[f64]) -> f64, x: &[f64], j: usize) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::singular(x, format!("integrand against test function {j} is not finite (|x| = {})", norm2(x))))
    }
}
