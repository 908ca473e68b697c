use crate::geometry::{norm2, Domain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic sample grid for pointwise suprema and infima.
///
/// Combines a uniform grid with geometric refinement towards declared zeros
/// (`per_octave` points per halving of the distance) and drops a relative
/// `exclusion` neighbourhood of every zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub uniform: usize,
    pub per_octave: usize,
    pub octaves: usize,
    pub exclusion: f64,
    /// Angular resolution for two-dimensional domains.
    pub directions: usize,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan { uniform: 10_000, per_octave: 1000, octaves: 28, exclusion: 1e-8, directions: 64 }
    }
}

impl SamplePlan {
    /// A lighter plan for multi-dimensional domains.
    pub fn coarse() -> Self {
        SamplePlan { uniform: 1000, per_octave: 50, octaves: 28, exclusion: 1e-8, directions: 32 }
    }

    pub fn for_domain(domain: &Domain) -> Self {
        if domain.dim() == 1 {
            Self::default()
        } else {
            Self::coarse()
        }
    }

    /// Sample points inside `domain`, refined towards `zeros`.
    pub fn points(&self, domain: &Domain, zeros: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let scale = domain.diameter();
        let mut pts = match *domain {
            Domain::Interval { a, b } => self.interval_points(a, b, zeros),
            Domain::Ball { radius, dim } => self.ball_points(radius, dim, zeros),
            Domain::Square { a, b } => self.square_points(a, b, zeros),
        };
        let cut = self.exclusion * scale;
        pts.retain(|x| domain.contains(x) && zeros.iter().all(|z| dist(x, z) >= cut));
        pts
    }

    fn geometric(&self, extent: f64) -> impl Iterator<Item = f64> + '_ {
        let n = self.octaves * self.per_octave;
        (0..=n).map(move |j| extent * (-(j as f64) / self.per_octave as f64).exp2())
    }

    fn interval_points(&self, a: f64, b: f64, zeros: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let l = b - a;
        let mut pts: Vec<Vec<f64>> = (0..self.uniform).map(|i| vec![a + (i as f64 + 0.5) * l / self.uniform as f64]).collect();
        for z in zeros {
            for rho in self.geometric(l) {
                pts.push(vec![z[0] - rho]);
                pts.push(vec![z[0] + rho]);
            }
        }
        pts
    }

    fn directions(&self, dim: usize) -> Vec<Vec<f64>> {
        match dim {
            1 => vec![vec![1.0], vec![-1.0]],
            2 => (0..self.directions)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / self.directions as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect(),
            d => {
                let mut dirs = Vec::new();
                for i in 0..d {
                    for s in [1.0, -1.0] {
                        let mut e = vec![0.0; d];
                        e[i] = s;
                        dirs.push(e);
                    }
                }
                let diag = 1.0 / (d as f64).sqrt();
                dirs.push(vec![diag; d]);
                dirs.push((0..d).map(|i| if i % 2 == 0 { diag } else { -diag }).collect());
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                for _ in 0..self.directions {
                    let g: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let n = norm2(&g);
                    if n > 1e-3 {
                        dirs.push(g.iter().map(|c| c / n).collect());
                    }
                }
                dirs
            }
        }
    }

    fn ball_points(&self, radius: f64, dim: usize, zeros: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut radii: Vec<f64> = (0..self.uniform).map(|i| (i as f64 + 0.5) * radius / self.uniform as f64).collect();
        radii.extend(self.geometric(radius));
        let dirs = self.directions(dim);
        let mut pts: Vec<Vec<f64>> =
            dirs.iter().flat_map(|e| radii.iter().map(move |&r| e.iter().map(|c| c * r).collect())).collect();
        for z in zeros.iter().filter(|z| norm2(z) > 0.0) {
            for e in &dirs {
                for rho in self.geometric(radius) {
                    pts.push(z.iter().zip(e).map(|(zi, ei)| zi + rho * ei).collect());
                }
            }
        }
        pts
    }

    fn square_points(&self, a: f64, b: f64, zeros: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = (self.uniform as f64).sqrt().ceil() as usize;
        let h = (b - a) / n as f64;
        let mut pts = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                pts.push(vec![a + (i as f64 + 0.5) * h, a + (j as f64 + 0.5) * h]);
            }
        }
        let dirs = self.directions(2);
        for z in zeros {
            for e in &dirs {
                for rho in self.geometric(b - a) {
                    pts.push(vec![z[0] + rho * e[0], z[1] + rho * e[1]]);
                }
            }
        }
        pts
    }
}

pub(crate) fn dist(x: &[f64], z: &[f64]) -> f64 {
    x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Distance from `x` to the nearest point of `zeros` (∞ if none).
pub(crate) fn distance_to_zeros(x: &[f64], zeros: &[Vec<f64>]) -> f64 {
    zeros.iter().map(|z| dist(x, z)).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_plan_avoids_zero_neighbourhood() {
        let plan = SamplePlan::default();
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let pts = plan.points(&d, &[vec![0.0]]);
        assert!(pts.iter().all(|x| x[0].abs() >= 2e-8 && x[0].abs() < 1.0));
        // one octave of geometric points per annulus [2^-k-1, 2^-k)
        let in_octave = pts.iter().filter(|x| x[0] > 1.0 / 64.0 && x[0] <= 1.0 / 32.0).count();
        assert!(in_octave >= 1000, "{in_octave}");
    }

    #[test]
    fn plans_are_deterministic() {
        let plan = SamplePlan::coarse();
        let d = Domain::ball(1.0, 5).unwrap();
        assert_eq!(plan.points(&d, &[vec![0.0; 5]]), plan.points(&d, &[vec![0.0; 5]]));
    }
}
