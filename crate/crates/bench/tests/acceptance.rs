//! One line per acceptance criterion; exits non-zero if any criterion fails.
//!
//! Criterion 5 runs the full-resolution benchmarks and is skipped unless
//! `RTE_FULL_SCALE=1` is set.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::DVector;
use nalgebra_sparse::convert::serial::convert_csr_dense;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rte_bench::output::write_outputs;
use rte_bench::{run, Mode, Preset, RunConfig};
use rte_core::dg::assemble_operators;
use rte_core::fullrank::run_full_rank;
use rte_core::lowrank::{draw_candidates, LowRankState};
use rte_core::metrics::compression_ratio;
use rte_core::problem::ProblemSetup;
use rte_core::{field, AngularQuadrature, DGSpace, Discretization, Error, LowRankParams, SolverParams, SpatialMesh, SweepPlan};

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn preset(name: &str, sigma_s: f64, level: usize, full: bool) -> RunConfig {
    Preset::from_name(name, sigma_s, level).unwrap().config(full).unwrap()
}

fn sweep_oracle() -> Verdict {
    let mesh = SpatialMesh::new(-1.0, 1.0, -1.0, 1.0, 8, 8).unwrap();
    let space = DGSpace::new(mesh, 1).unwrap();
    let ops = assemble_operators(&space, &|x, y| 1.0 + x * x + 0.5 * y, &|x, _| 0.1 + 0.05 * x).unwrap();
    let plan = SweepPlan::new(&space, &ops);
    let quad = AngularQuadrature::chebyshev_legendre(8, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for j in 0..quad.len() {
        let omega = quad.direction(j);
        let lu = convert_csr_dense::<f64>(&ops.upwind(omega).assemble(true)).lu();
        for _ in 0..20 {
            let b = DVector::from_fn(ops.n_dofs(), |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let direct = lu.solve(&b).unwrap();
            let swept = plan.sweep(j, omega, &b).unwrap();
            worst = worst.max((&swept - &direct).norm() / direct.norm());
        }
    }
    verdict(worst <= 1e-11, format!("max relative difference {worst:.2e} over {} angles x 20 right-hand sides", quad.len()))
}

fn double_factorial(n: i64) -> f64 {
    if n <= 0 {
        1.0
    } else {
        n as f64 * double_factorial(n - 2)
    }
}

fn quadrature_exactness() -> Verdict {
    let quad = AngularQuadrature::chebyshev_legendre(8, 4).unwrap();
    let mut worst = 0.0f64;
    let mut worst_at = (0, 0, 0);
    for a in 0..=8i32 {
        for b in 0..=(8 - a) {
            for c in 0..=(8 - a - b) {
                let exact = if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
                    0.0
                } else {
                    double_factorial((a - 1) as i64) * double_factorial((b - 1) as i64) * double_factorial((c - 1) as i64)
                        / double_factorial((a + b + c + 1) as i64)
                };
                let got = quad.integrate(|[x, y, z]| x.powi(a) * y.powi(b) * z.powi(c));
                let err = (got - exact).abs();
                if err > worst {
                    worst = err;
                    worst_at = (a, b, c);
                }
            }
        }
    }
    let sum: f64 = quad.weights().iter().sum();
    let mut sym = 0.0f64;
    for j in 0..quad.len() {
        let [x, y, z] = quad.direction(j);
        for image in [[-x, y, z], [x, -y, z], [x, y, -z]] {
            let best = (0..quad.len())
                .map(|k| {
                    let d = quad.direction(k);
                    (d[0] - image[0]).abs().max((d[1] - image[1]).abs()).max((d[2] - image[2]).abs()).max((quad.weight(k) - quad.weight(j)).abs())
                })
                .fold(f64::INFINITY, f64::min);
            sym = sym.max(best);
        }
    }
    let ok = worst <= 1e-12 && (sum - 1.0).abs() <= 1e-14 && sym <= 1e-14;
    verdict(
        ok,
        format!(
            "max monomial error {worst:.2e} at x^{}y^{}z^{}, weight sum - 1 = {:.1e}, symmetry defect {sym:.1e}",
            worst_at.0,
            worst_at.1,
            worst_at.2,
            sum - 1.0
        ),
    )
}

fn low_rank_properties() -> Verdict {
    let mut setup = ProblemSetup::homogeneous((-1.0, 1.0, -1.0, 1.0), (4, 4), (16, 8), 1.0, 0.0, field(|x: f64, y: f64| (-4.0 * (x * x + y * y)).exp()));
    setup.sigma_s = field(|x: f64, y: f64| 1.0 + 0.5 * x + 0.25 * y * y);
    setup.sigma_a = field(|x: f64, _| 0.2 + 0.1 * x);
    setup.inflow = field(|x: f64, y: f64| 0.5 + 0.1 * x - 0.2 * y);
    let disc = Discretization::new(&setup, true).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut orth, mut proj, mut gal, mut snap) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut steps = 0;
    let mut restarts = 0;
    while steps < 200 {
        let phi = DVector::from_fn(disc.n_dofs(), |_, _| rng.random::<f64>());
        let mut state = LowRankState::new(&disc, &phi);
        restarts += 1;
        while steps < 200 {
            let unsampled = state.unsampled();
            if unsampled.is_empty() || state.rank() >= disc.n_dofs() {
                break;
            }
            let p = rng.random_range(1..=3);
            let eps_mgs = if rng.random::<bool>() { 1e-10 } else { 1e-15 };
            let params = LowRankParams { p, eps_mgs, ..LowRankParams::default() };
            let batch = draw_candidates(&mut rng, &unsampled, p);
            state.sample_angles(&batch, &params).unwrap();
            let d = state.diagnostics().unwrap();
            orth = orth.max(d.orthogonality);
            proj = proj.max(d.projection);
            gal = gal.max(d.galerkin);
            snap = snap.max(d.snapshots);
            steps += 1;
        }
    }
    let ok = orth <= 1e-10 && proj <= 1e-11 && gal <= 1e-8 && snap <= 1e-9;
    verdict(ok, format!("{steps} steps over {restarts} inner loops: orthonormality {orth:.1e}, projection {proj:.1e}, Galerkin {gal:.1e}, X R {snap:.1e}"))
}

fn parity() -> Verdict {
    let mut cases = Vec::new();
    for s in [0.1, 1.0, 10.0, 100.0] {
        cases.push((format!("homogeneous({s})"), preset("homogeneous", s, 2, false)));
    }
    cases.push(("pin-cell 40x40".into(), preset("pin-cell", 0.0, 1, false)));
    cases.push(("variable-scattering 40x40".into(), preset("variable-scattering", 0.0, 1, false)));
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, cfg) in cases {
        let o = run(&cfg).unwrap();
        let fr = o.full.as_ref().unwrap().iterations;
        let lr = o.low.as_ref().unwrap().iterations;
        let d = o.comparison.unwrap().phi_diff;
        let good = d <= 1e-6 && fr.abs_diff(lr) <= 1;
        ok &= good;
        parts.push(format!("{name}: diff {d:.2e} iters {fr}/{lr}{}", if good { "" } else { " (out of bounds)" }));
    }
    verdict(ok, parts.join("; "))
}

fn in_band(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo && v <= hi
}

fn paper_bands() -> Verdict {
    if std::env::var("RTE_FULL_SCALE").as_deref() != Ok("1") {
        return Verdict::Skip("set RTE_FULL_SCALE=1 to run the full-resolution benchmarks".into());
    }
    let mut ok = true;
    let mut parts = Vec::new();

    let h = run(&preset("homogeneous", 100.0, 2, true)).unwrap();
    let r = h.rank().unwrap() as f64;
    let it = h.low.as_ref().unwrap().iterations as f64;
    let good = in_band(r, 45.0, 65.0) && (it - 4.0).abs() <= 3.0;
    ok &= good;
    parts.push(format!("homogeneous(100) rank {r} iters {it}"));

    let v = run(&preset("variable-scattering", 0.0, 1, true)).unwrap();
    let r = v.rank().unwrap() as f64;
    let cr = v.compression_ratio().unwrap();
    let it = v.low.as_ref().unwrap().iterations as f64;
    let good = in_band(r, 270.0, 330.0) && in_band(cr, 0.35, 0.43) && (it - 7.0).abs() <= 3.0;
    ok &= good;
    parts.push(format!("variable-scattering rank {r} C-R {:.2}% iters {it}", 100.0 * cr));

    let mut pin = preset("pin-cell", 0.0, 1, true);
    pin.mode = Mode::LowRank;
    let mut ranks = Vec::new();
    let mut iters = Vec::new();
    for seed in 0..8 {
        pin.lowrank.seed = seed;
        let o = run(&pin).unwrap();
        ranks.push(o.rank().unwrap() as f64);
        iters.push(o.low.as_ref().unwrap().iterations as f64);
    }
    let mean_rank = ranks.iter().sum::<f64>() / 8.0;
    let mean_it = iters.iter().sum::<f64>() / 8.0;
    let good = in_band(mean_rank, 195.0, 230.0) && (mean_it - 21.13).abs() <= 3.0;
    ok &= good;
    parts.push(format!("pin-cell mean rank {mean_rank:.2} mean iters {mean_it:.2}"));
    verdict(ok, parts.join("; "))
}

fn mild_augmentation() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [1, 2, 3] {
        let mut cfg = preset("variable-scattering", 0.0, 1, true);
        cfg.mode = Mode::LowRank;
        cfg.lowrank.p = p;
        let o = run(&cfg).unwrap();
        let inner = &o.low.as_ref().unwrap().low_rank.as_ref().unwrap().inner;
        let last = inner.last().unwrap().oversampling;
        let max = inner.iter().map(|s| s.oversampling).fold(0.0, f64::max);
        ok &= last < 0.20;
        parts.push(format!("p={p}: final {last:.3} (max over outer iterations {max:.3}, rank {})", o.rank().unwrap()));
    }
    verdict(ok, parts.join("; "))
}

fn dsa_acceleration() -> Verdict {
    let cfg = preset("homogeneous", 100.0, 2, false);
    let disc = Discretization::new(&cfg.setup(), true).unwrap();
    let dsa = run_full_rank(&disc, &SolverParams { store_psi: false, ..SolverParams::default() }).unwrap().iterations;
    let plain = SolverParams { use_dsa: false, store_psi: false, ..SolverParams::default() };
    let (si, note) = match run_full_rank(&disc, &plain) {
        Ok(r) => (r.iterations, String::new()),
        Err(Error::MaxIterationsExceeded { iterations, last_change }) => (iterations, format!(" (not converged, last change {last_change:.1e})")),
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    verdict(5 * dsa <= si, format!("SI-DSA {dsa} iterations, plain SI {}{note}", if note.is_empty() { si.to_string() } else { format!(">= {si}") }))
}

fn determinism() -> Verdict {
    let mut cfg = preset("pin-cell", 0.0, 1, false);
    cfg.nx = 16;
    cfg.ny = 16;
    cfg.lowrank.seed = 7;
    let base = std::env::temp_dir().join(format!("rte-acceptance-{}", std::process::id()));
    let (a, b) = (base.join("a"), base.join("b"));
    write_outputs(&[run(&cfg).unwrap()], &a).unwrap();
    write_outputs(&[run(&cfg).unwrap()], &b).unwrap();
    let same = ["metrics.csv", "history.csv"].iter().all(|f| fs::read(a.join(f)).unwrap() == fs::read(b.join(f)).unwrap());
    let _ = fs::remove_dir_all(&base);
    verdict(same, "metrics.csv and history.csv compared byte for byte".into())
}

fn compression_formula() -> Verdict {
    let cr = compression_ratio(4096, 128, 56);
    verdict((100.0 * cr - 45.13).abs() <= 0.1, format!("{:.3}% vs 45.13%", 100.0 * cr))
}

type Check = fn() -> Verdict;

fn main() {
    let checks: [(u32, &str, Check); 9] = [
        (1, "sweep matches direct solve", sweep_oracle),
        (2, "CL(8,4) quadrature exactness", quadrature_exactness),
        (3, "low-rank machinery invariants", low_rank_properties),
        (4, "low-rank / full-rank parity", parity),
        (5, "full-resolution benchmark bands", paper_bands),
        (6, "mild augmentation", mild_augmentation),
        (7, "DSA acceleration", dsa_acceleration),
        (8, "determinism", determinism),
        (9, "compression-ratio formula", compression_formula),
    ];
    let mut failed = 0;
    for (id, name, check) in checks {
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            Verdict::Fail(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match v {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Verdict::Skip(d) => ("SKIP", d),
        };
        println!("criterion {id} {tag} {name}: {detail} [{secs:.1}s]");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
