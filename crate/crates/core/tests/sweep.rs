use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::convert::serial::convert_csr_dense;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rte_core::dg::{assemble_operators, project_source, BoundaryVectors};
use rte_core::{AngularQuadrature, DGSpace, SpatialMesh, SweepPlan};

fn setup(n: usize, sigma_s: f64, sigma_a: f64) -> (DGSpace, rte_core::DiscreteOperators, SweepPlan) {
    let mesh = SpatialMesh::new(-1.0, 1.0, -1.0, 1.0, n, n).unwrap();
    let space = DGSpace::new(mesh, 1).unwrap();
    let ops = assemble_operators(&space, &|x, _| sigma_s * (1.0 + x * x), &|_, y| sigma_a * (1.0 + y.abs())).unwrap();
    let plan = SweepPlan::new(&space, &ops);
    (space, ops, plan)
}

#[test]
fn sweep_matches_dense_solve_for_every_angle() {
    let (_, ops, plan) = setup(8, 1.0, 0.5);
    let quad = AngularQuadrature::chebyshev_legendre(8, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = ops.n_dofs();
    for j in 0..quad.len() {
        let omega = quad.direction(j);
        let a: DMatrix<f64> = convert_csr_dense(&ops.upwind(omega).assemble(true));
        let lu = a.lu();
        for _ in 0..5 {
            let b = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
            let direct = lu.solve(&b).unwrap();
            let swept = plan.sweep(j, omega, &b).unwrap();
            assert!((&swept - &direct).norm() <= 1e-11 * direct.norm(), "angle {j}");
        }
    }
}

#[test]
fn upwind_matrix_is_block_triangular_in_sweep_order() {
    let (space, ops, plan) = setup(4, 1.0, 0.0);
    let s = space.dofs_per_cell();
    for omega in [[0.5, 0.5, 0.7], [-0.5, 0.5, 0.7], [0.5, -0.5, 0.7], [-0.5, -0.5, 0.7]] {
        let order = plan.sweep_order(omega);
        let mut pos = vec![0; order.len()];
        for (k, &c) in order.iter().enumerate() {
            pos[c] = k;
        }
        let a = ops.upwind(omega).assemble(true);
        for (row, lane) in a.row_iter().enumerate() {
            for &col in lane.col_indices() {
                assert!(pos[col / s] <= pos[row / s], "cell {} depends on later cell {} for {omega:?}", row / s, col / s);
            }
        }
    }
}

#[test]
fn grazing_directions_are_swept_exactly() {
    let (_, ops, plan) = setup(5, 2.0, 0.1);
    let n = ops.n_dofs();
    let b = DVector::from_fn(n, |i, _| ((i * 7) % 11) as f64 - 5.0);
    for omega in [[0.0, 0.6, 0.8], [0.0, -0.6, 0.8], [0.6, 0.0, 0.8], [-0.6, 0.0, -0.8]] {
        let a: DMatrix<f64> = convert_csr_dense(&ops.upwind(omega).assemble(true));
        let direct = a.lu().solve(&b).unwrap();
        let swept = plan.sweep(0, omega, &b).unwrap();
        assert!((&swept - &direct).norm() <= 1e-11 * direct.norm());
    }
}

#[test]
fn unit_inflow_without_material_gives_unit_flux() {
    let mesh = SpatialMesh::new(0.0, 2.0, 0.0, 1.0, 6, 3).unwrap();
    let space = DGSpace::new(mesh, 1).unwrap();
    let ops = assemble_operators(&space, &|_, _| 0.0, &|_, _| 0.0).unwrap();
    let plan = SweepPlan::new(&space, &ops);
    let boundary = BoundaryVectors::assemble(&space, &|_, _| 1.0);
    let one = project_source(&space, &|_, _| 1.0);
    let quad = AngularQuadrature::chebyshev_legendre(8, 4).unwrap();
    for j in 0..quad.len() {
        let omega = quad.direction(j);
        let psi = plan.sweep(j, omega, &boundary.for_direction(omega)).unwrap();
        assert!((&psi - &one).amax() < 1e-12, "angle {j}");
    }
}
