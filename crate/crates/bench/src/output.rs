//! Result files.
//!
//! * `metrics.csv`: one row per run.
//! * `history.csv`: one row per outer iteration per solver.
//! * `timing.csv`: wall-clock times and speedup (kept apart so the other
//!   tables are reproducible byte for byte).
//! * `flux_fr.txt`, `flux_lr.txt`: `x_center y_center mean_phi` per cell.
//! * `config.txt`: the configuration of the first run.
//!
//! Floats are written with 17 significant digits.

use std::fs;
use std::path::Path;

use nalgebra::DVector;

use crate::run::{RunError, RunOutcome};

fn io_err(path: &Path, e: impl Into<std::io::Error>) -> RunError {
    RunError::Io { path: path.display().to_string(), source: e.into() }
}

fn csv_err(path: &Path, e: csv::Error) -> RunError {
    io_err(path, std::io::Error::other(e))
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes all result files for `runs` into `dir`, creating it if needed.
pub fn write_outputs(runs: &[RunOutcome], dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    write_metrics(runs, &dir.join("metrics.csv"))?;
    write_history(runs, &dir.join("history.csv"))?;
    write_timing(runs, &dir.join("timing.csv"))?;
    for (id, run) in runs.iter().enumerate() {
        let suffix = if runs.len() == 1 { String::new() } else { format!("_run{id}") };
        if let Some(full) = &run.full {
            let p = dir.join(format!("flux_fr{suffix}.txt"));
            fs::write(&p, flux_grid(run, &full.phi)).map_err(|e| io_err(&p, e))?;
        }
        if let Some(low) = &run.low {
            let p = dir.join(format!("flux_lr{suffix}.txt"));
            fs::write(&p, flux_grid(run, &low.phi)).map_err(|e| io_err(&p, e))?;
        }
    }
    if let Some(first) = runs.first() {
        let p = dir.join("config.txt");
        fs::write(&p, first.config.to_text()).map_err(|e| io_err(&p, e))?;
    }
    Ok(())
}

pub const METRICS_HEADER: [&str; 14] = [
    "run_id",
    "preset",
    "seed",
    "mode",
    "n_x",
    "n_omega",
    "fr_iterations",
    "lr_iterations",
    "rank",
    "compression_ratio",
    "phi_diff_l2",
    "psi_diff_l2",
    "final_oversampling",
    "max_oversampling",
];

fn write_metrics(runs: &[RunOutcome], path: &Path) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(METRICS_HEADER).map_err(|e| csv_err(path, e))?;
    for (id, run) in runs.iter().enumerate() {
        let inner = run.low.as_ref().and_then(|r| r.low_rank.as_ref()).map(|o| &o.inner);
        let final_os = inner.and_then(|v| v.last()).map(|s| s.oversampling);
        let max_os = inner.map(|v| v.iter().map(|s| s.oversampling).fold(f64::NEG_INFINITY, f64::max));
        let cmp = run.comparison.as_ref();
        w.write_record([
            id.to_string(),
            run.config.name.clone(),
            run.config.lowrank.seed.to_string(),
            run.config.mode.to_string(),
            run.disc.n_dofs().to_string(),
            run.disc.n_angles().to_string(),
            opt_usize(run.full.as_ref().map(|r| r.iterations)),
            opt_usize(run.low.as_ref().map(|r| r.iterations)),
            opt_usize(run.rank()),
            opt_f64(run.compression_ratio()),
            opt_f64(cmp.map(|c| c.phi_diff)),
            opt_f64(cmp.and_then(|c| c.psi_diff)),
            opt_f64(final_os),
            opt_f64(max_os),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub const HISTORY_HEADER: [&str; 10] =
    ["run_id", "solver", "iteration", "diff_l2", "diff_inf", "rank", "basis_rank", "sampled", "oversampling", "reorthogonalizations"];

fn write_history(runs: &[RunOutcome], path: &Path) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(HISTORY_HEADER).map_err(|e| csv_err(path, e))?;
    for (id, run) in runs.iter().enumerate() {
        if let Some(full) = &run.full {
            for (k, (l2, inf)) in full.diff_l2.iter().zip(&full.diff_inf).enumerate() {
                w.write_record([id.to_string(), "full".into(), (k + 1).to_string(), fmt_f64(*l2), fmt_f64(*inf), String::new(), String::new(), String::new(), String::new(), String::new()])
                    .map_err(|e| csv_err(path, e))?;
            }
        }
        if let Some(low) = &run.low {
            let inner = low.low_rank.as_ref().map(|o| o.inner.as_slice()).unwrap_or(&[]);
            for (k, (l2, inf)) in low.diff_l2.iter().zip(&low.diff_inf).enumerate() {
                let s = inner.get(k);
                w.write_record([
                    id.to_string(),
                    "lowrank".into(),
                    (k + 1).to_string(),
                    fmt_f64(*l2),
                    fmt_f64(*inf),
                    opt_usize(s.map(|s| s.truncated_rank)),
                    opt_usize(s.map(|s| s.basis_rank)),
                    opt_usize(s.map(|s| s.sampled_angles.len())),
                    opt_f64(s.map(|s| s.oversampling)),
                    opt_usize(s.map(|s| s.reorthogonalizations)),
                ])
                .map_err(|e| csv_err(path, e))?;
            }
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn write_timing(runs: &[RunOutcome], path: &Path) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["run_id", "assembly_seconds", "fr_seconds", "lr_seconds", "speedup"]).map_err(|e| csv_err(path, e))?;
    for (id, run) in runs.iter().enumerate() {
        w.write_record([
            id.to_string(),
            fmt_f64(run.assembly_seconds),
            opt_f64(run.full.as_ref().map(|r| r.wall_seconds)),
            opt_f64(run.low.as_ref().map(|r| r.wall_seconds)),
            opt_f64(run.comparison.map(|c| c.speedup)),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// One line `x_center y_center mean` per cell, rows of the mesh bottom to top.
pub fn flux_grid(run: &RunOutcome, phi: &DVector<f64>) -> String {
    let space = &run.disc.space;
    let mesh = space.mesh();
    let mut out = String::new();
    for c in 0..mesh.n_cells() {
        let (x, y) = mesh.cell_center(c);
        out.push_str(&format!("{} {} {}\n", fmt_f64(x), fmt_f64(y), fmt_f64(space.cell_mean(phi, c))));
    }
    out
}
