use crate::error::{Error, Result};
use crate::geometry::{cell_points, norm2, Mesh, QuadratureRule};
use crate::sum::pairwise_sum;
use rayon::prelude::*;

/// Continuous piecewise-linear functions on a mesh vanishing on the boundary.
///
/// Only interior nodes carry unknowns, so every discrete function has zero
/// trace by construction.
#[derive(Debug, Clone)]
pub struct FESpace {
    mesh: Mesh,
    dof_of_node: Vec<Option<usize>>,
    node_of_dof: Vec<usize>,
}

impl FESpace {
    pub fn new(mesh: Mesh) -> Result<Self> {
        let mut dof_of_node = vec![None; mesh.num_nodes()];
        let mut node_of_dof = Vec::new();
        for (i, d) in dof_of_node.iter_mut().enumerate() {
            if !mesh.is_boundary(i) {
                *d = Some(node_of_dof.len());
                node_of_dof.push(i);
            }
        }
        if node_of_dof.is_empty() {
            return Err(Error::invalid("mesh has no interior nodes"));
        }
        Ok(FESpace { mesh, dof_of_node, node_of_dof })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn num_dofs(&self) -> usize {
        self.node_of_dof.len()
    }

    pub fn dof(&self, node: usize) -> Option<usize> {
        self.dof_of_node[node]
    }

    pub fn node_of_dof(&self, dof: usize) -> usize {
        self.node_of_dof[dof]
    }

    /// Barycentric coordinates of `x` in cell `c`, given the hat gradients.
    pub(crate) fn barycentric(&self, c: usize, grads: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        self.mesh
            .cell(c)
            .iter()
            .zip(grads)
            .map(|(&n, g)| 1.0 + g.iter().zip(self.mesh.node(n)).zip(x).map(|((gi, ni), xi)| gi * (xi - ni)).sum::<f64>())
            .collect()
    }

    /// Coefficients of the nodal interpolant of `f`.
    pub fn interpolate(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        self.node_of_dof.iter().map(|&n| f(self.mesh.node(n))).collect()
    }

    fn local_values(&self, c: usize, coeffs: &[f64]) -> Vec<f64> {
        self.mesh.cell(c).iter().map(|&n| self.dof(n).map_or(0.0, |d| coeffs[d])).collect()
    }

    /// `∫ g(x, f_h(x))` over the mesh.
    pub fn integrate_with<G>(&self, coeffs: &[f64], rule: &QuadratureRule, g: G) -> Result<f64>
    where
        G: Fn(&[f64], f64) -> f64 + Sync,
    {
        if coeffs.len() != self.num_dofs() {
            return Err(Error::invalid(format!("expected {} coefficients, got {}", self.num_dofs(), coeffs.len())));
        }
        let per_cell: Vec<f64> = (0..self.mesh.num_cells())
            .into_par_iter()
            .map(|c| {
                let grads = self.mesh.hat_gradients(c);
                let u = self.local_values(c, coeffs);
                let mut s = 0.0;
                for (x, w) in cell_points(&self.mesh, c, rule) {
                    let lam = self.barycentric(c, &grads, &x);
                    let fh: f64 = lam.iter().zip(&u).map(|(l, u)| l * u).sum();
                    let val = g(&x, fh);
                    if !val.is_finite() {
                        return Err(Error::singular(&x, format!("integrand is not finite in cell {c}")));
                    }
                    s += w * val;
                }
                Ok(s)
            })
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&per_cell))
    }

    /// `∫_{|x − centre| < radius} |f_h|`.
    pub fn local_mass(&self, coeffs: &[f64], centre: &[f64], radius: f64, rule: &QuadratureRule) -> Result<f64> {
        self.integrate_with(coeffs, rule, |x, fh| {
            let dx: Vec<f64> = x.iter().zip(centre).map(|(a, b)| a - b).collect();
            if norm2(&dx) < radius {
                fh.abs()
            } else {
                0.0
            }
        })
    }

    /// `‖f_h − u‖_{L²}`.
    pub fn l2_error(&self, coeffs: &[f64], exact: impl Fn(&[f64]) -> f64 + Sync, rule: &QuadratureRule) -> Result<f64> {
        Ok(self.integrate_with(coeffs, rule, |x, fh| (fh - exact(x)).powi(2))?.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_disk_mesh, build_interval_mesh};

    #[test]
    fn interior_dofs_only() {
        let s = FESpace::new(build_interval_mesh(0.0, 1.0, 8, 1.0, 0.0).unwrap()).unwrap();
        assert_eq!(s.num_dofs(), 7);
        let d = FESpace::new(build_disk_mesh(1.0, 4, 8, 1.0).unwrap()).unwrap();
        assert_eq!(d.num_dofs(), 1 + 3 * 8);
    }

    #[test]
    fn interpolant_of_linear_is_exact() {
        let s = FESpace::new(build_interval_mesh(0.0, 1.0, 10, 1.0, 0.0).unwrap()).unwrap();
        let f = |x: &[f64]| x[0] * (1.0 - x[0]);
        let u = s.interpolate(f);
        let rule = QuadratureRule::interval(4);
        // On each cell the error is t(h − t), whose square integrates to h⁵/30.
        let e = s.l2_error(&u, f, &rule).unwrap();
        let exact = (0.1f64.powi(4) / 30.0).sqrt();
        assert!((e - exact).abs() < 1e-12, "{e} vs {exact}");
    }
}
