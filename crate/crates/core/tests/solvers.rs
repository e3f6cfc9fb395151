use rte_core::fullrank::run_full_rank;
use rte_core::lowrank::run_low_rank;
use rte_core::problem::ProblemSetup;
use rte_core::{field, Discretization, DiscretizationF32, Error, LowRankParams, SolverParams};

fn gaussian(sigma_s: f64, sigma_a: f64, n: usize, quad: (usize, usize)) -> ProblemSetup<f64> {
    ProblemSetup::homogeneous((-1.0, 1.0, -1.0, 1.0), (n, n), quad, sigma_s, sigma_a, field(|x: f64, y: f64| (-100.0 * (x * x + y * y)).exp()))
}

#[test]
fn pure_absorber_converges_in_two_iterations() {
    let disc = Discretization::new(&gaussian(0.0, 2.0, 8, (8, 4)), false).unwrap();
    let params = SolverParams { use_dsa: false, ..SolverParams::default() };
    let r = run_full_rank(&disc, &params).unwrap();
    assert_eq!(r.iterations, 2);
    assert_eq!(r.diff_inf[1], 0.0);
}

#[test]
fn dsa_cuts_iterations_in_thick_medium() {
    let disc = Discretization::new(&gaussian(100.0, 0.0, 16, (8, 4)), true).unwrap();
    let dsa = run_full_rank(&disc, &SolverParams::default()).unwrap();
    let plain = run_full_rank(&disc, &SolverParams { use_dsa: false, max_iterations: 2000, ..SolverParams::default() });
    let plain_iters = match plain {
        Ok(r) => r.iterations,
        Err(Error::MaxIterationsExceeded { iterations, .. }) => iterations,
        Err(e) => panic!("{e}"),
    };
    assert!(dsa.iterations * 5 <= plain_iters, "dsa {} plain {}", dsa.iterations, plain_iters);
}

#[test]
fn iteration_limit_is_an_error() {
    let disc = Discretization::new(&gaussian(100.0, 0.0, 8, (8, 4)), false).unwrap();
    let params = SolverParams { use_dsa: false, max_iterations: 3, ..SolverParams::default() };
    match run_full_rank(&disc, &params) {
        Err(Error::MaxIterationsExceeded { iterations: 3, last_change }) => assert!(last_change > 1e-6),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn low_rank_run_matches_full_rank_run() {
    let disc = Discretization::new(&gaussian(100.0, 0.0, 16, (16, 8)), true).unwrap();
    let full = run_full_rank(&disc, &SolverParams::default()).unwrap();
    let low = run_low_rank(&disc, &SolverParams::default(), &LowRankParams::default()).unwrap();
    assert!(low.iterations.abs_diff(full.iterations) <= 1);
    assert!((&low.phi - &full.phi).norm() <= 1e-6);
    let factors = low.low_rank.as_ref().unwrap().factors.as_ref().unwrap();
    assert_eq!(low.dof_count, factors.rank() * (disc.n_dofs() + disc.n_angles()));
    let psi = full.psi.as_ref().unwrap();
    assert!(factors.rank() < 64);
    let rel = rte_core::metrics::psi_difference(psi, factors, 7) / psi.norm();
    assert!(rel < 1e-3, "{rel}");
}

#[test]
fn single_precision_pipeline_runs() {
    let setup = ProblemSetup::<f32>::homogeneous((-1.0, 1.0, -1.0, 1.0), (8, 8), (8, 4), 1.0, 0.0, field(|x: f32, y: f32| (-10.0 * (x * x + y * y)).exp()));
    let disc = DiscretizationF32::new(&setup, true).unwrap();
    let params = SolverParams { tolerance: 1e-5, ..SolverParams::default() };
    let full = run_full_rank(&disc, &params).unwrap();
    let low = run_low_rank(&disc, &params, &LowRankParams { eps_res: 1e-5, eps_diff: 1e-5, ..LowRankParams::default() }).unwrap();
    assert!((&low.phi - &full.phi).norm() < 1e-4);
}
