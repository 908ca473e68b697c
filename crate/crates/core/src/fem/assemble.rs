use super::coeffs::CoefficientSet;
use super::space::FESpace;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::geometry::{cell_points, QuadratureRule};
use crate::sum::pairwise_sum;
use crate::weights::WeightFunction;
use rayon::prelude::*;

/// Discrete weak problem `B_v(f_h, φ_r) = h(φ_r)` for every basis function.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    /// `M[r][c] = B_v(φ_c, φ_r)`.
    pub matrix: CsrMatrix,
    /// `load[r] = ∫ k φ_r`.
    pub load: Vec<f64>,
    /// True when `b̃ ≡ 0` and `ã` is symmetric.
    pub symmetric: bool,
    /// Gram matrix of `‖f‖²_X = ∫v²f² + ∫v⁴|∇f|²`.
    pub x_gram: CsrMatrix,
    /// `‖kv⁻¹‖_{L²}`, which bounds `|h|` in the dual of `X`.
    pub load_bound: f64,
}

struct CellBlock {
    rows: Vec<Option<usize>>,
    forms: Vec<Vec<f64>>,
    load: Vec<f64>,
    scalar: f64,
}

/// Loops over cells in parallel. For each quadrature point, `point` receives
/// `(x, w, λ, ∇λ)` and adds to the local blocks; one flat `n×n` block per form.
fn cell_loop<P>(space: &FESpace, rule: &QuadratureRule, n_forms: usize, point: P) -> Result<Vec<CellBlock>>
where
    P: Fn(&[f64], f64, &[f64], &[Vec<f64>], &mut CellBlock) -> Result<()> + Sync,
{
    let mesh = space.mesh();
    (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let grads = mesh.hat_gradients(c);
            let nloc = grads.len();
            let mut block = CellBlock {
                rows: mesh.cell(c).iter().map(|&n| space.dof(n)).collect(),
                forms: vec![vec![0.0; nloc * nloc]; n_forms],
                load: vec![0.0; nloc],
                scalar: 0.0,
            };
            for (x, w) in cell_points(mesh, c, rule) {
                let lam = space.barycentric(c, &grads, &x);
                point(&x, w, &lam, &grads, &mut block).map_err(|e| match e {
                    Error::SingularEvaluation { point, what } => {
                        Error::SingularEvaluation { point, what: format!("{what} in cell {c}") }
                    }
                    e => e,
                })?;
            }
            Ok(block)
        })
        .collect()
}

/// Merges per-cell blocks in cell order into one matrix per form.
fn merge(n: usize, blocks: &[CellBlock], form: usize) -> Result<CsrMatrix> {
    let mut t = Vec::new();
    for b in blocks {
        let nloc = b.rows.len();
        for (i, ri) in b.rows.iter().enumerate() {
            let Some(r) = ri else { continue };
            for (j, cj) in b.rows.iter().enumerate() {
                if let Some(c) = cj {
                    t.push((*r, *c, b.forms[form][i * nloc + j]));
                }
            }
        }
    }
    CsrMatrix::from_triplets(n, t)
}

fn finite(x: &[f64], v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::singular(x, format!("{what} is not finite")))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Assembles `B_v(f,g) = Σ∫a_ij ∂_i f ∂_j g + ∫g b·∇f + ∫cfg` and `h(g) = ∫kg`
/// on the P1 space. For piecewise polynomials `D_v` is the classical gradient.
pub fn assemble(coeffs: &CoefficientSet, space: &FESpace, rule: &QuadratureRule) -> Result<AssembledSystem> {
    coeffs.validate()?;
    if coeffs.dim() != space.mesh().dim() {
        return Err(Error::invalid(format!(
            "coefficients are {}-dimensional but the mesh is {}-dimensional",
            coeffs.dim(),
            space.mesh().dim()
        )));
    }
    let blocks = cell_loop(space, rule, 2, |x, w, lam, grads, blk| {
        let nloc = lam.len();
        let a = coeffs.a(x);
        let b = coeffs.b(x);
        let c = finite(x, coeffs.c(x), "c")?;
        let k = finite(x, coeffs.k.value(x), "k")?;
        let v = coeffs.v.value(x);
        let (v2, v4) = (v * v, v.powi(4));
        if a.iter().flatten().chain(&b).any(|e| !e.is_finite()) {
            return Err(Error::singular(x, "a or b is not finite"));
        }
        for r in 0..nloc {
            for col in 0..nloc {
                // Σ_ij a_ij ∂_iφ_c ∂_jφ_r
                let diff: f64 = (0..a.len()).map(|i| grads[col][i] * dot(&a[i], &grads[r])).sum();
                let conv = lam[r] * dot(&b, &grads[col]);
                blk.forms[0][r * nloc + col] += w * (diff + conv + c * lam[col] * lam[r]);
                blk.forms[1][r * nloc + col] += w * (v2 * lam[r] * lam[col] + v4 * dot(&grads[r], &grads[col]));
            }
            blk.load[r] += w * k * lam[r];
        }
        blk.scalar += w * finite(x, (k / v).powi(2), "k/v")?;
        Ok(())
    })?;
    let n = space.num_dofs();
    let matrix = merge(n, &blocks, 0)?;
    let x_gram = merge(n, &blocks, 1)?;
    let mut load = vec![0.0; n];
    for b in &blocks {
        for (i, ri) in b.rows.iter().enumerate() {
            if let Some(r) = ri {
                load[*r] += b.load[i];
            }
        }
    }
    let per_cell: Vec<f64> = blocks.iter().map(|b| b.scalar).collect();
    let load_bound = pairwise_sum(&per_cell).sqrt();
    Ok(AssembledSystem { matrix, load, symmetric: coeffs.is_symmetric(), x_gram, load_bound })
}

/// Weighted stiffness `S = ∫v⁴∇φ·∇ψ` and weighted mass `Q = ∫v⁴φψ`.
pub fn weighted_pair(space: &FESpace, v: &WeightFunction, rule: &QuadratureRule) -> Result<(CsrMatrix, CsrMatrix)> {
    let blocks = cell_loop(space, rule, 2, |x, w, lam, grads, blk| {
        let nloc = lam.len();
        let v4 = finite(x, v.value(x).powi(4), "v")?;
        for r in 0..nloc {
            for c in 0..nloc {
                blk.forms[0][r * nloc + c] += w * v4 * dot(&grads[r], &grads[c]);
                blk.forms[1][r * nloc + c] += w * v4 * lam[r] * lam[c];
            }
        }
        Ok(())
    })?;
    let n = space.num_dofs();
    Ok((merge(n, &blocks, 0)?, merge(n, &blocks, 1)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::coeffs::Coefficient;
    use crate::geometry::{build_disk_mesh, build_interval_mesh};

    fn unit_space(n: usize) -> FESpace {
        FESpace::new(build_interval_mesh(0.0, 1.0, n, 1.0, 0.0).unwrap()).unwrap()
    }

    #[test]
    fn hand_assembled_entries() {
        let rule = QuadratureRule::interval(3);
        let one = WeightFunction::one(1);
        let stiff = CoefficientSet::isotropic(1, 1.0, 0.0, Coefficient::Constant(1.0), one.clone());
        let s = assemble(&stiff, &unit_space(2), &rule).unwrap();
        assert!((s.matrix.get(0, 0) - 4.0).abs() < 1e-14);
        assert!((s.load[0] - 0.5).abs() < 1e-14);
        let mass = CoefficientSet::isotropic(1, 0.0, 1.0, Coefficient::Constant(1.0), one);
        let m = assemble(&mass, &unit_space(2), &rule).unwrap();
        assert!((m.matrix.get(0, 0) - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn symmetric_without_drift() {
        let s = CoefficientSet::power_example(2, 1, 0.5);
        let space = FESpace::new(build_disk_mesh(1.0, 6, 12, 2.0).unwrap()).unwrap();
        let sys = assemble(&s, &space, &QuadratureRule::triangle(4)).unwrap();
        assert!(sys.symmetric);
        assert!(sys.matrix.asymmetry() <= 1e-12);
    }

    #[test]
    fn drift_breaks_symmetry() {
        let mut s = CoefficientSet::isotropic(1, 1.0, 1.0, Coefficient::Constant(1.0), WeightFunction::one(1));
        s.b_tilde = vec![Coefficient::Constant(1.0)];
        let sys = assemble(&s, &unit_space(8), &QuadratureRule::interval(3)).unwrap();
        assert!(!sys.symmetric);
        assert!(sys.matrix.asymmetry() > 1e-3);
    }
}
