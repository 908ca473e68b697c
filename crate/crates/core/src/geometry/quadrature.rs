use super::mesh::{build_interval_mesh, Grading, Mesh};
use super::sphere_area;
use crate::error::{Error, Result};
use crate::sum::pairwise_sum;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Points and weights on a reference cell: `[0, 1]` or the unit triangle
/// with vertices `(0,0), (1,0), (0,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub order: usize,
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `g`-point Gauss–Legendre on `[0, 1]`.
    pub fn interval(g: usize) -> Self {
        let (x, w) = gauss_legendre(g);
        QuadratureRule {
            order: g,
            dim: 1,
            points: x.iter().map(|&t| vec![0.5 * (t + 1.0)]).collect(),
            weights: w.iter().map(|&w| 0.5 * w).collect(),
        }
    }

    /// Collapsed Gauss rule on the unit triangle, with the collapse at the
    /// first vertex: `(x, y) = (s(1−t), st)`. Exact to degree `2g − 1`, and
    /// the Jacobian `s` damps point singularities at that vertex.
    pub fn triangle(g: usize) -> Self {
        let (xs, ws) = gauss_legendre(g + 1);
        let (xt, wt) = gauss_legendre(g);
        let mut points = Vec::with_capacity((g + 1) * g);
        let mut weights = Vec::with_capacity((g + 1) * g);
        for (s, wsi) in xs.iter().zip(&ws) {
            let s = 0.5 * (s + 1.0);
            for (t, wti) in xt.iter().zip(&wt) {
                let t = 0.5 * (t + 1.0);
                points.push(vec![s * (1.0 - t), s * t]);
                weights.push(0.25 * wsi * wti * s);
            }
        }
        QuadratureRule { order: g, dim: 2, points, weights }
    }

    pub fn for_mesh(mesh: &Mesh, g: usize) -> Self {
        Self::for_dim(mesh.dim(), g)
    }

    pub fn for_dim(dim: usize, g: usize) -> Self {
        if dim == 1 {
            Self::interval(g)
        } else {
            Self::triangle(g)
        }
    }
}

/// Default Gauss order per cell.
pub const DEFAULT_ORDER: usize = 5;

/// Geometric subdivision levels for cells touching the grading centre.
const SINGULAR_LEVELS_1D: usize = 24;
const SINGULAR_LEVELS_2D: usize = 10;

/// Physical quadrature points and weights for cell `c`.
///
/// On a graded mesh, a cell with a vertex at the grading centre is split
/// geometrically towards that vertex, so integrable point singularities
/// there are resolved.
pub fn cell_points(mesh: &Mesh, c: usize, rule: &QuadratureRule) -> Vec<(Vec<f64>, f64)> {
    let levels = if mesh.dim() == 1 { SINGULAR_LEVELS_1D } else { SINGULAR_LEVELS_2D };
    split_cell_points(mesh, c, rule, levels, true)
}

fn touches_centre(mesh: &Mesh, c: usize) -> bool {
    let g = mesh.grading();
    g.exponent > 1.0 && mesh.cell(c).iter().any(|&i| mesh.node(i) == g.center.as_slice())
}

/// As [`cell_points`] with `levels` geometric layers; `core` keeps the
/// innermost piece containing the singular vertex.
fn split_cell_points(mesh: &Mesh, c: usize, rule: &QuadratureRule, levels: usize, core: bool) -> Vec<(Vec<f64>, f64)> {
    let v = mesh.cell(c);
    let g = mesh.grading();
    let singular = if g.exponent > 1.0 { v.iter().position(|&i| mesh.node(i) == g.center.as_slice()) } else { None };
    let mut out = Vec::new();
    match (mesh.dim(), singular) {
        (1, Some(k)) => {
            let s = mesh.node(v[k])[0];
            let e = mesh.node(v[1 - k])[0];
            let mut outer = 1.0;
            for j in 0..=levels {
                if j == levels && !core {
                    break;
                }
                let inner = if j == levels { 0.0 } else { 0.5 * outer };
                push_segment(&mut out, s + inner * (e - s), s + outer * (e - s), rule);
                outer = inner;
            }
        }
        (1, None) => push_segment(&mut out, mesh.node(v[0])[0], mesh.node(v[1])[0], rule),
        (_, Some(k)) => {
            let p0 = point2(mesh.node(v[k]));
            let p1 = point2(mesh.node(v[(k + 1) % 3]));
            let p2 = point2(mesh.node(v[(k + 2) % 3]));
            let at = |p: [f64; 2], t: f64| [p0[0] + t * (p[0] - p0[0]), p0[1] + t * (p[1] - p0[1])];
            let mut outer = 1.0;
            for _ in 0..levels {
                let inner = 0.5 * outer;
                let (a, b, c2, d) = (at(p1, inner), at(p1, outer), at(p2, outer), at(p2, inner));
                push_triangle(&mut out, a, b, c2, rule);
                push_triangle(&mut out, a, c2, d, rule);
                outer = inner;
            }
            if core {
                push_triangle(&mut out, p0, at(p1, outer), at(p2, outer), rule);
            }
        }
        (_, None) => push_triangle(&mut out, point2(mesh.node(v[0])), point2(mesh.node(v[1])), point2(mesh.node(v[2])), rule),
    }
    out
}

fn point2(x: &[f64]) -> [f64; 2] {
    [x[0], x[1]]
}

fn push_segment(out: &mut Vec<(Vec<f64>, f64)>, a: f64, b: f64, rule: &QuadratureRule) {
    let h = (b - a).abs();
    for (xi, w) in rule.points.iter().zip(&rule.weights) {
        out.push((vec![a + (b - a) * xi[0]], w * h));
    }
}

/// The first vertex is the collapse vertex of the triangle rule.
fn push_triangle(out: &mut Vec<(Vec<f64>, f64)>, a: [f64; 2], b: [f64; 2], d: [f64; 2], rule: &QuadratureRule) {
    let det = ((b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1])).abs();
    for (xi, w) in rule.points.iter().zip(&rule.weights) {
        let x = (0..2).map(|k| a[k] + (b[k] - a[k]) * xi[0] + (d[k] - a[k]) * xi[1]).collect();
        out.push((x, w * det));
    }
}

/// `∫_Ω f` by the composite rule. Cells contribute in index order and are
/// combined by pairwise summation.
pub fn integrate<F>(field: F, mesh: &Mesh, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let per_cell: Vec<f64> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let mut s = 0.0;
            for (x, w) in cell_points(mesh, c, rule) {
                let f = field(&x);
                if !f.is_finite() {
                    return Err(Error::singular(&x, format!("integrand is not finite in cell {c}")));
                }
                s += w * f;
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&per_cell))
}

/// `∫_Ω f` with a divergence test at the grading centre: the cells touching
/// it are integrated with the innermost `2^{−8}, 2^{−16}, 2^{−24}` fraction
/// removed, and growth above 10% per level flags divergence.
pub fn integrate_checked<F>(field: F, mesh: &Mesh, rule: &QuadratureRule) -> Result<RadialIntegral>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let total = integrate(&field, mesh, rule)?;
    let near: Vec<usize> = (0..mesh.num_cells()).filter(|&c| touches_centre(mesh, c)).collect();
    if near.is_empty() {
        return Ok(RadialIntegral::Finite(total));
    }
    let sum_near = |levels: Option<usize>| -> Result<f64> {
        let mut parts = Vec::with_capacity(near.len());
        for &c in &near {
            let pts = match levels {
                Some(l) => split_cell_points(mesh, c, rule, l, false),
                None => cell_points(mesh, c, rule),
            };
            let mut s = 0.0;
            for (x, w) in pts {
                let f = field(&x);
                if !f.is_finite() {
                    return Err(Error::singular(&x, format!("integrand is not finite in cell {c}")));
                }
                s += w * f;
            }
            parts.push(s);
        }
        Ok(pairwise_sum(&parts))
    };
    let rest = total - sum_near(None)?;
    let values = [8, 16, 24].iter().map(|&l| Ok(rest + sum_near(Some(l))?)).collect::<Result<Vec<f64>>>()?;
    if values.windows(2).all(|w| w[1].abs() > 1.1 * w[0].abs()) {
        Ok(RadialIntegral::Divergent(values))
    } else {
        Ok(RadialIntegral::Finite(total))
    }
}

/// Outcome of a radial integral.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialIntegral {
    Finite(f64),
    /// Values at the successive refinement levels, growing without bound.
    Divergent(Vec<f64>),
}

impl RadialIntegral {
    pub fn value(&self) -> Option<f64> {
        match self {
            RadialIntegral::Finite(v) => Some(*v),
            RadialIntegral::Divergent(_) => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, RadialIntegral::Divergent(_))
    }
}

/// Octaves cut off near `r = 0` at each of the three divergence-test levels.
const TRUNCATION_OCTAVES: [i32; 3] = [16, 32, 48];
const CELLS_PER_OCTAVE: usize = 4;
const RADIAL_CELLS: usize = 128;
const RADIAL_GRADING: f64 = 6.0;

/// `|S^{d−1}| ∫₀^R g(r) r^{d−1} dr`.
///
/// Divergence is tested on the truncated integrals `∫_ε^R` with
/// `ε = R·2^{−16}, R·2^{−32}, R·2^{−48}`: if they grow by more than 10% per
/// level the integral is flagged divergent. Otherwise the value comes from a
/// graded mesh of `(0, R)`.
pub fn integrate_radial<G>(g: G, d: usize, radius: f64, order: usize) -> Result<RadialIntegral>
where
    G: Fn(f64) -> f64 + Sync,
{
    if d == 0 || !(radius > 0.0) {
        return Err(Error::invalid("radial integral needs d >= 1 and R > 0"));
    }
    let rule = QuadratureRule::interval(order);
    let area = sphere_area(d);
    let f = |x: &[f64]| g(x[0]) * x[0].powi(d as i32 - 1);
    let mut values = Vec::with_capacity(TRUNCATION_OCTAVES.len());
    for oct in TRUNCATION_OCTAVES {
        let n = oct as usize * CELLS_PER_OCTAVE;
        let nodes = (0..=n)
            .map(|i| if i == n { radius } else { radius * (-(oct as f64) * (1.0 - i as f64 / n as f64)).exp2() })
            .collect();
        let mesh = Mesh::from_interval_nodes(nodes, Grading { exponent: 1.0, center: vec![0.0] })?;
        values.push(area * integrate(f, &mesh, &rule)?);
    }
    if values.windows(2).all(|w| w[1].abs() > 1.1 * w[0].abs()) {
        return Ok(RadialIntegral::Divergent(values));
    }
    let mesh = build_interval_mesh(0.0, radius, RADIAL_CELLS, RADIAL_GRADING, 0.0)?;
    Ok(RadialIntegral::Finite(area * integrate(f, &mesh, &rule)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_disk_mesh;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_weights_and_nodes() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            assert!(w.iter().all(|&w| w > 0.0));
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
        let (x, _) = gauss_legendre(2);
        assert_relative_eq!(x[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn interval_exactness() {
        let r = QuadratureRule::interval(5);
        for k in 0..=9 {
            let q: f64 = r.points.iter().zip(&r.weights).map(|(p, w)| w * p[0].powi(k)).sum();
            assert_relative_eq!(q, 1.0 / (k as f64 + 1.0), max_relative = 1e-13);
        }
    }

    #[test]
    fn triangle_exactness() {
        // ∫_T x^a y^b = a! b! / (a+b+2)!
        let f = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
        let r = QuadratureRule::triangle(5);
        for a in 0..=9 {
            for b in 0..=(9 - a) {
                let q: f64 = r.points.iter().zip(&r.weights).map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32)).sum();
                assert_relative_eq!(q, f(a) * f(b) / f(a + b + 2), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn graded_singular_integral() {
        let mesh = build_interval_mesh(0.0, 1.0, 64, 3.0, 0.0).unwrap();
        let v = integrate(|x| x[0].powf(-0.5), &mesh, &QuadratureRule::interval(5)).unwrap();
        assert!((v - 2.0).abs() < 1e-5, "{v}");
    }

    #[test]
    fn singular_point_is_reported() {
        let mesh = build_interval_mesh(-1.0, 1.0, 3, 1.0, 0.0).unwrap();
        let r = integrate(|x| if x[0].abs() < 0.1 { f64::NAN } else { 1.0 }, &mesh, &QuadratureRule::interval(5));
        assert!(matches!(r, Err(Error::SingularEvaluation { .. })));
    }

    #[test]
    fn checked_integrals() {
        let mesh = build_interval_mesh(0.0, 1.0, 32, 3.0, 0.0).unwrap();
        let rule = QuadratureRule::interval(5);
        assert!(integrate_checked(|x| x[0].powf(-1.5), &mesh, &rule).unwrap().is_divergent());
        assert!(integrate_checked(|x| 1.0 / x[0], &mesh, &rule).unwrap().is_divergent());
        let v = integrate_checked(|x| x[0].powf(-0.5), &mesh, &rule).unwrap().value().unwrap();
        assert!((v - 2.0).abs() < 1e-5);
        let disk = build_disk_mesh(1.0, 8, 16, 3.0).unwrap();
        let tri = QuadratureRule::triangle(5);
        assert!(integrate_checked(|x| x[0].hypot(x[1]).powf(-2.5), &disk, &tri).unwrap().is_divergent());
        assert!(!integrate_checked(|x| x[0].hypot(x[1]).powf(-1.5), &disk, &tri).unwrap().is_divergent());
    }

    #[test]
    fn disk_integrals() {
        let mesh = build_disk_mesh(1.0, 4, 16, 1.0).unwrap();
        let a = integrate(|_| 1.0, &mesh, &QuadratureRule::triangle(5)).unwrap();
        assert_relative_eq!(a, mesh.total_measure(), max_relative = 1e-13);
    }

    #[test]
    fn radial_integrals() {
        let v = integrate_radial(|_| 1.0, 3, 1.0, 5).unwrap().value().unwrap();
        assert_relative_eq!(v, 4.0 * PI / 3.0, max_relative = 1e-12);
        let v = integrate_radial(|r| 1.0 / r, 3, 1.0, 5).unwrap().value().unwrap();
        assert_relative_eq!(v, 2.0 * PI, max_relative = 1e-10);
        assert!(integrate_radial(|r| r.powf(-2.5), 2, 1.0, 5).unwrap().is_divergent());
        assert!(integrate_radial(|r| r.powi(-2), 2, 1.0, 5).unwrap().is_divergent());
        assert!(integrate_radial(|r| r.powi(-3), 3, 1.0, 5).unwrap().is_divergent());
        let v = integrate_radial(|r| r.powf(-1.5), 2, 1.0, 5).unwrap().value().unwrap();
        assert_relative_eq!(v, 4.0 * PI, max_relative = 1e-7);
    }

    #[test]
    fn radial_matches_disk_quadrature() {
        let g = |r: f64| (1.0 - r * r).powi(2);
        let radial = integrate_radial(g, 2, 1.0, 5).unwrap().value().unwrap();
        let mesh = build_disk_mesh(1.0, 32, 256, 1.0).unwrap();
        let disk = integrate(|x| g(x[0].hypot(x[1])), &mesh, &QuadratureRule::triangle(5)).unwrap();
        assert!((radial - disk).abs() < 1e-3);
    }
}
