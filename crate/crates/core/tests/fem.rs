use degenera::fem::{assemble, solve, Coefficient, CoefficientSet, CsrMatrix, FESpace, SolverMethod};
use degenera::geometry::{build_disk_mesh, build_interval_mesh, QuadratureRule};
use degenera::weights::WeightFunction;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// -Δu + u = 5 - r² on the unit disk, u = 1 - r².
fn disk_error(rings: usize, sectors: usize) -> f64 {
    let k = Coefficient::function(|x| 5.0 - x[0] * x[0] - x[1] * x[1]);
    let coeffs = CoefficientSet::isotropic(2, 1.0, 1.0, k, WeightFunction::one(2));
    let space = FESpace::new(build_disk_mesh(1.0, rings, sectors, 1.0).unwrap()).unwrap();
    let rule = QuadratureRule::triangle(5);
    let sys = assemble(&coeffs, &space, &rule).unwrap();
    let rep = solve(&sys, SolverMethod::Cg, 1e-12, 10_000).unwrap();
    space.l2_error(&rep.solution, |x| 1.0 - x[0] * x[0] - x[1] * x[1], &rule).unwrap()
}

#[test]
fn disk_manufactured_converges_at_second_order() {
    // the polygonal boundary also contributes O(h²)
    let e: Vec<f64> = [(4, 8), (8, 16), (16, 32), (32, 64)].iter().map(|&(r, s)| disk_error(r, s)).collect();
    for w in e.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.3, "{e:?}");
    }
}

#[test]
fn galerkin_solution_minimises_the_energy_functional() {
    // symmetric problem: x solves Mx = b iff it minimises ½xᵀMx − bᵀx
    let k = Coefficient::function(|x| (3.0 * x[0]).cos());
    let coeffs = CoefficientSet::isotropic(1, 2.0, 0.5, k, WeightFunction::radial_power(1.0, 1, 4));
    let space = FESpace::new(build_interval_mesh(-1.0, 1.0, 40, 1.0, 0.0).unwrap()).unwrap();
    let sys = assemble(&coeffs, &space, &QuadratureRule::interval(5)).unwrap();
    let x = solve(&sys, SolverMethod::Auto, 1e-13, 10_000).unwrap().solution;
    let j = |y: &[f64]| 0.5 * sys.matrix.bilinear(y, y) - y.iter().zip(&sys.load).map(|(a, b)| a * b).sum::<f64>();
    let j0 = j(&x);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let y: Vec<f64> = x.iter().map(|xi| xi + 1e-3 * rng.random_range(-1.0..1.0)).collect();
        assert!(j(&y) >= j0 - 1e-14);
    }
    // and the residual is orthogonal to every basis function
    let r: Vec<f64> = sys.matrix.matvec(&x).iter().zip(&sys.load).map(|(a, b)| a - b).collect();
    let scale = sys.load.iter().map(|b| b.abs()).fold(0.0, f64::max);
    assert!(r.iter().all(|ri| ri.abs() <= 1e-10 * scale));
}

#[test]
fn solvers_agree_on_a_drift_problem() {
    let mut coeffs = CoefficientSet::isotropic(1, 1.0, 1.0, Coefficient::Constant(1.0), WeightFunction::one(1));
    coeffs.b_tilde = vec![Coefficient::Constant(0.7)];
    let space = FESpace::new(build_interval_mesh(0.0, 1.0, 64, 1.0, 0.0).unwrap()).unwrap();
    let sys = assemble(&coeffs, &space, &QuadratureRule::interval(5)).unwrap();
    assert!(!sys.symmetric);
    let a = solve(&sys, SolverMethod::DenseLu, 1e-12, 0).unwrap().solution;
    let b = solve(&sys, SolverMethod::BiCgStab, 1e-12, 10_000).unwrap().solution;
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-9);
    }
    assert!(solve(&sys, SolverMethod::Cg, 1e-12, 100).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn csr_matvec_matches_dense(entries in prop::collection::vec((0usize..6, 0usize..6, -10.0f64..10.0), 0..40),
                                x in prop::collection::vec(-5.0f64..5.0, 6)) {
        let m = CsrMatrix::from_triplets(6, entries.clone()).unwrap();
        let mut dense = vec![vec![0.0; 6]; 6];
        for (i, j, v) in entries {
            dense[i][j] += v;
        }
        let y = m.matvec(&x);
        for i in 0..6 {
            let expect: f64 = (0..6).map(|j| dense[i][j] * x[j]).sum();
            prop_assert!((y[i] - expect).abs() <= 1e-10 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn isotropic_systems_are_symmetric_and_positive(a in 0.1f64..5.0, c in 0.0f64..5.0, cells in 2usize..30,
                                                     x in prop::collection::vec(-1.0f64..1.0, 29)) {
        let coeffs = CoefficientSet::isotropic(1, a, c, Coefficient::Constant(1.0), WeightFunction::one(1));
        let space = FESpace::new(build_interval_mesh(0.0, 1.0, cells, 1.0, 0.0).unwrap()).unwrap();
        let sys = assemble(&coeffs, &space, &QuadratureRule::interval(3)).unwrap();
        prop_assert!(sys.matrix.asymmetry() <= 1e-12);
        let x = &x[..space.num_dofs()];
        if x.iter().any(|v| *v != 0.0) {
            prop_assert!(sys.matrix.bilinear(x, x) > 0.0);
        }
    }
}
