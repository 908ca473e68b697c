use crate::error::{Error, Result};
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt::Write;

/// Grading of a mesh towards a singular point.
#[derive(Debug, Clone, PartialEq)]
pub struct Grading {
    pub exponent: f64,
    pub center: Vec<f64>,
}

/// Simplicial mesh in one or two dimensions: intervals or triangles.
///
/// Coordinates and connectivity are stored flat; `node(i)` and `cell(c)`
/// return slices of length `dim` and `dim + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    coords: Vec<f64>,
    cells: Vec<usize>,
    boundary: Vec<bool>,
    grading: Grading,
}

impl Mesh {
    /// One-dimensional mesh from strictly increasing nodes.
    pub fn from_interval_nodes(nodes: Vec<f64>, grading: Grading) -> Result<Self> {
        if nodes.len() < 2 || nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("interval nodes must be strictly increasing with at least two entries"));
        }
        let n = nodes.len();
        let cells = (0..n - 1).flat_map(|i| [i, i + 1]).collect();
        let mut boundary = vec![false; n];
        boundary[0] = true;
        boundary[n - 1] = true;
        Ok(Mesh { dim: 1, coords: nodes, cells, boundary, grading })
    }

    /// Triangle mesh from node coordinates and counter-clockwise cells.
    pub fn from_triangles(coords: Vec<[f64; 2]>, cells: Vec<[usize; 3]>, boundary: Vec<bool>, grading: Grading) -> Result<Self> {
        if boundary.len() != coords.len() {
            return Err(Error::invalid("boundary marker count must equal node count"));
        }
        if cells.iter().flatten().any(|&i| i >= coords.len()) {
            return Err(Error::invalid("cell references a missing node"));
        }
        let mesh = Mesh {
            dim: 2,
            coords: coords.into_iter().flatten().collect(),
            cells: cells.into_iter().flatten().collect(),
            boundary,
            grading,
        };
        if let Some(c) = (0..mesh.num_cells()).find(|&c| !(mesh.signed_measure(c) > 0.0)) {
            return Err(Error::invalid(format!("cell {c} is not positively oriented")));
        }
        Ok(mesh)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.boundary.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len() / (self.dim + 1)
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let k = self.dim + 1;
        &self.cells[c * k..(c + 1) * k]
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.num_nodes()).filter(|&i| self.boundary[i]).collect()
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    fn signed_measure(&self, c: usize) -> f64 {
        let v = self.cell(c);
        match self.dim {
            1 => self.node(v[1])[0] - self.node(v[0])[0],
            _ => {
                let (a, b, d) = (self.node(v[0]), self.node(v[1]), self.node(v[2]));
                0.5 * ((b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]))
            }
        }
    }

    pub fn cell_measure(&self, c: usize) -> f64 {
        self.signed_measure(c).abs()
    }

    pub fn total_measure(&self) -> f64 {
        let m: Vec<f64> = (0..self.num_cells()).map(|c| self.cell_measure(c)).collect();
        crate::sum::pairwise_sum(&m)
    }

    /// Map reference coordinates (`[0,1]` or the unit triangle) into cell `c`.
    pub fn map_point(&self, c: usize, xi: &[f64]) -> Vec<f64> {
        let v = self.cell(c);
        match self.dim {
            1 => {
                let (a, b) = (self.node(v[0])[0], self.node(v[1])[0]);
                vec![a + (b - a) * xi[0]]
            }
            _ => {
                let (a, b, d) = (self.node(v[0]), self.node(v[1]), self.node(v[2]));
                (0..2).map(|k| a[k] + (b[k] - a[k]) * xi[0] + (d[k] - a[k]) * xi[1]).collect()
            }
        }
    }

    /// Gradients of the P1 hat functions of cell `c`, one per local vertex.
    pub fn hat_gradients(&self, c: usize) -> Vec<Vec<f64>> {
        let v = self.cell(c);
        match self.dim {
            1 => {
                let h = self.node(v[1])[0] - self.node(v[0])[0];
                vec![vec![-1.0 / h], vec![1.0 / h]]
            }
            _ => {
                let (a, b, d) = (self.node(v[0]), self.node(v[1]), self.node(v[2]));
                let det = 2.0 * self.signed_measure(c);
                let g1 = vec![(b[1] - d[1]) / det, (d[0] - b[0]) / det];
                let g2 = vec![(d[1] - a[1]) / det, (a[0] - d[0]) / det];
                let g3 = vec![(a[1] - b[1]) / det, (b[0] - a[0]) / det];
                vec![g1, g2, g3]
            }
        }
    }

    /// Edges (node pairs, sorted) that belong to exactly one cell.
    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        if self.dim == 1 {
            return vec![];
        }
        let mut count: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        for c in 0..self.num_cells() {
            let v = self.cell(c);
            for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                let e = [v[i].min(v[j]), v[i].max(v[j])];
                *count.entry(e).or_default() += 1;
            }
        }
        count.into_iter().filter(|&(_, n)| n == 1).map(|(e, _)| e).collect()
    }

    /// Uniform refinement: bisection in 1D, red refinement in 2D. New
    /// boundary nodes stay on the polygon, so the P1 spaces are nested.
    pub fn refined(&self) -> Mesh {
        match self.dim {
            1 => {
                let mut nodes = Vec::with_capacity(2 * self.num_nodes() - 1);
                for c in 0..self.num_cells() {
                    let v = self.cell(c);
                    let (a, b) = (self.node(v[0])[0], self.node(v[1])[0]);
                    nodes.push(a);
                    nodes.push(0.5 * (a + b));
                }
                nodes.push(self.coords[self.num_nodes() - 1]);
                Mesh::from_interval_nodes(nodes, self.grading.clone()).expect("bisection keeps nodes increasing")
            }
            _ => {
                let mut coords: Vec<[f64; 2]> = (0..self.num_nodes()).map(|i| [self.node(i)[0], self.node(i)[1]]).collect();
                let mut boundary = self.boundary.clone();
                let on_boundary: std::collections::BTreeSet<[usize; 2]> = self.boundary_edges().into_iter().collect();
                let mut mid: HashMap<[usize; 2], usize> = HashMap::new();
                let mut cells = Vec::with_capacity(4 * self.num_cells());
                let mut midpoint = |i: usize, j: usize, coords: &mut Vec<[f64; 2]>, boundary: &mut Vec<bool>| -> usize {
                    let e = [i.min(j), i.max(j)];
                    *mid.entry(e).or_insert_with(|| {
                        let (a, b) = (coords[i], coords[j]);
                        coords.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
                        boundary.push(on_boundary.contains(&e));
                        coords.len() - 1
                    })
                };
                for c in 0..self.num_cells() {
                    let v = self.cell(c);
                    let (a, b, d) = (v[0], v[1], v[2]);
                    let ab = midpoint(a, b, &mut coords, &mut boundary);
                    let bd = midpoint(b, d, &mut coords, &mut boundary);
                    let da = midpoint(d, a, &mut coords, &mut boundary);
                    cells.extend([[a, ab, da], [ab, b, bd], [da, bd, d], [ab, bd, da]]);
                }
                Mesh::from_triangles(coords, cells, boundary, self.grading.clone()).expect("red refinement keeps orientation")
            }
        }
    }

    /// Plain-text listing: `node <i> <coords…> <boundary>` then `cell <c> <vertices…>`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for i in 0..self.num_nodes() {
            let _ = write!(s, "node {i}");
            for x in self.node(i) {
                let _ = write!(s, " {x:.16e}");
            }
            let _ = writeln!(s, " {}", u8::from(self.boundary[i]));
        }
        for c in 0..self.num_cells() {
            let _ = write!(s, "cell {c}");
            for v in self.cell(c) {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        s
    }
}

/// Graded mesh of `[a, b]` with `N` cells; nodes cluster at `c` like `|t|^q`.
///
/// The cells are split between the two sides of `c` in proportion to their
/// lengths so that `c` itself is a node.
pub fn build_interval_mesh(a: f64, b: f64, n: usize, q: f64, c: f64) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::invalid("interval mesh needs N >= 1"));
    }
    if !(a < b) {
        return Err(Error::invalid(format!("interval mesh needs a < b, got ({a}, {b})")));
    }
    if !(q >= 1.0) {
        return Err(Error::invalid(format!("grading exponent must be >= 1, got {q}")));
    }
    let grading = Grading { exponent: q, center: vec![c] };
    if q == 1.0 {
        let nodes = (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect();
        return Mesh::from_interval_nodes(nodes, grading);
    }
    if !(a <= c && c <= b) {
        return Err(Error::invalid(format!("grading centre {c} lies outside [{a}, {b}]")));
    }
    let (left, right) = (c - a, b - c);
    let mut nl = ((n as f64) * left / (b - a)).round() as usize;
    if left > 0.0 && nl == 0 {
        nl = 1;
    }
    if right > 0.0 && nl == n {
        nl = n - 1;
    }
    if nl == 0 && left > 0.0 || n - nl == 0 && right > 0.0 {
        return Err(Error::invalid("graded interval mesh with an interior centre needs N >= 2"));
    }
    let nr = n - nl;
    let mut nodes = Vec::with_capacity(n + 1);
    for i in (1..=nl).rev() {
        nodes.push(c - left * (i as f64 / nl as f64).powf(q));
    }
    nodes.push(c);
    for i in 1..=nr {
        nodes.push(c + right * (i as f64 / nr as f64).powf(q));
    }
    nodes[0] = a;
    nodes[n] = b;
    Mesh::from_interval_nodes(nodes, grading)
}

/// Polar-structured disk mesh: rings at `r_k = R (k/rings)^q`, a triangle fan
/// at the centre and quads split into two triangles elsewhere.
pub fn build_disk_mesh(radius: f64, rings: usize, sectors: usize, q: f64) -> Result<Mesh> {
    if rings < 1 {
        return Err(Error::invalid("disk mesh needs rings >= 1"));
    }
    if sectors < 3 {
        return Err(Error::invalid(format!("disk mesh needs sectors >= 3, got {sectors}")));
    }
    if !(radius > 0.0) || !(q >= 1.0) {
        return Err(Error::invalid("disk mesh needs R > 0 and q >= 1"));
    }
    let mut coords = vec![[0.0, 0.0]];
    let mut boundary = vec![false];
    for k in 1..=rings {
        let r = radius * (k as f64 / rings as f64).powf(q);
        for j in 0..sectors {
            let th = 2.0 * PI * j as f64 / sectors as f64;
            coords.push([r * th.cos(), r * th.sin()]);
            boundary.push(k == rings);
        }
    }
    let id = |k: usize, j: usize| 1 + (k - 1) * sectors + j % sectors;
    let mut cells = Vec::with_capacity(sectors * (2 * rings - 1));
    for j in 0..sectors {
        cells.push([0, id(1, j), id(1, j + 1)]);
    }
    for k in 1..rings {
        for j in 0..sectors {
            let (a, b, c, d) = (id(k, j), id(k + 1, j), id(k + 1, j + 1), id(k, j + 1));
            cells.push([a, b, c]);
            cells.push([a, c, d]);
        }
    }
    Mesh::from_triangles(coords, cells, boundary, Grading { exponent: q, center: vec![0.0, 0.0] })
}

/// Area of the regular polygon with `sectors` vertices on the circle of radius `R`.
pub fn inscribed_polygon_area(radius: f64, sectors: usize) -> f64 {
    let s = sectors as f64;
    0.5 * s * radius * radius * (2.0 * PI / s).sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_interval() {
        let m = build_interval_mesh(0.0, 1.0, 4, 1.0, 0.0).unwrap();
        let xs: Vec<f64> = (0..m.num_nodes()).map(|i| m.node(i)[0]).collect();
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(m.is_boundary(0) && m.is_boundary(4) && !m.is_boundary(2));
        assert!(build_interval_mesh(0.0, 1.0, 0, 1.0, 0.0).is_err());
    }

    #[test]
    fn graded_interval_is_symmetric() {
        let m = build_interval_mesh(-1.0, 1.0, 8, 2.0, 0.0).unwrap();
        let xs: Vec<f64> = (0..m.num_nodes()).map(|i| m.node(i)[0]).collect();
        for i in 0..=8 {
            assert_relative_eq!(xs[i], -xs[8 - i], epsilon = 1e-15);
        }
        let h: Vec<f64> = (0..8).map(|c| m.cell_measure(c)).collect();
        assert!(h[4] < h[5] && h[5] < h[6] && h[6] < h[7]);
        assert_eq!(xs[4], 0.0);
        assert!(build_interval_mesh(0.0, 1.0, 4, 2.0, 2.0).is_err());
    }

    #[test]
    fn small_disk() {
        let m = build_disk_mesh(1.0, 2, 4, 1.0).unwrap();
        assert_eq!(m.num_cells(), 12);
        assert_relative_eq!(m.total_measure(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(inscribed_polygon_area(1.0, 4), 2.0, epsilon = 1e-14);
        assert_eq!(m.boundary_nodes().len(), 4);
        assert_eq!(m.boundary_edges().len(), 4);
        assert!(build_disk_mesh(1.0, 2, 2, 1.0).is_err());
    }

    #[test]
    fn disk_area_converges() {
        let m = build_disk_mesh(1.0, 16, 256, 1.0).unwrap();
        assert!((m.total_measure() - PI).abs() < 1e-3);
        let mut prev = 0.0;
        for s in [4, 8, 16, 32] {
            let a = build_disk_mesh(1.0, 2, s, 1.0).unwrap().total_measure();
            assert!(a > prev);
            prev = a;
        }
    }

    #[test]
    fn refinement_preserves_measure() {
        let m = build_disk_mesh(1.0, 3, 6, 2.0).unwrap();
        let r = m.refined();
        assert_eq!(r.num_cells(), 4 * m.num_cells());
        assert_relative_eq!(r.total_measure(), m.total_measure(), max_relative = 1e-14);
        assert_eq!(r.boundary_nodes().len(), 12);
        let i = build_interval_mesh(0.0, 2.0, 3, 1.0, 0.0).unwrap().refined();
        assert_eq!(i.num_cells(), 6);
        assert_relative_eq!(i.total_measure(), 2.0);
    }

    #[test]
    fn hat_gradients_sum_to_zero() {
        let m = build_disk_mesh(1.0, 2, 5, 1.0).unwrap();
        for c in 0..m.num_cells() {
            let g = m.hat_gradients(c);
            assert!((g[0][0] + g[1][0] + g[2][0]).abs() < 1e-12);
            assert!((g[0][1] + g[1][1] + g[2][1]).abs() < 1e-12);
        }
    }

    #[test]
    fn dump_lists_every_record() {
        let m = build_interval_mesh(0.0, 1.0, 2, 1.0, 0.0).unwrap();
        let d = m.dump();
        assert_eq!(d.lines().count(), 5);
        assert!(d.starts_with("node 0 0.0000000000000000e0 1\n"));
    }
}
