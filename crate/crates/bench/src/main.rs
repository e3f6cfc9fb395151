use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rte_bench::config::{ConfigError, Mode, RunConfig};
use rte_bench::output::write_outputs;
use rte_bench::presets::{Preset, PRESET_NAMES};
use rte_bench::run::{run, RunError, RunOutcome};

#[derive(Parser)]
#[command(name = "rte-bench", version, about = "Full-rank vs low-rank source iteration for 2D slab transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write the result files.
    Run(RunArgs),
    /// Run one configuration for several low-rank seeds.
    Batch {
        #[command(flatten)]
        args: RunArgs,
        /// Comma separated list of seeds.
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
    },
    /// List the built-in presets.
    Presets,
    /// Print the resolved configuration without running it.
    ShowConfig(RunArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Built-in preset name.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Configuration file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scattering cross section of the homogeneous preset.
    #[arg(long, default_value_t = 100.0)]
    sigma_s: f64,
    /// Refinement level of the homogeneous preset.
    #[arg(long, default_value_t = 2)]
    level: usize,
    /// Use the large meshes and quadratures of the heterogeneous presets.
    #[arg(long)]
    full_scale: bool,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Plain source iteration.
    #[arg(long)]
    no_dsa: bool,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, RunError> {
        let mut cfg = match (&self.preset, &self.config) {
            (_, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| RunError::Io { path: path.display().to_string(), source: e })?;
                RunConfig::from_text(&text)?
            }
            (Some(name), None) => Preset::from_name(name, self.sigma_s, self.level)?.config(self.full_scale)?,
            (None, None) => Preset::from_name("homogeneous", self.sigma_s, self.level)?.config(self.full_scale)?,
        };
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(s) = self.seed {
            cfg.lowrank.seed = s;
        }
        if let Some(p) = self.p {
            cfg.lowrank.p = p;
        }
        if let Some(q) = self.q {
            cfg.lowrank.q = q;
        }
        if let Some(n) = self.max_iterations {
            cfg.solver.max_iterations = n;
        }
        if self.no_dsa {
            cfg.solver.use_dsa = false;
        }
        for kv in &self.overrides {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: 0, message: format!("expected KEY=VALUE, got `{kv}`") })?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn summary(id: usize, o: &RunOutcome) {
    let mut line = format!("run {id} seed {}:", o.config.lowrank.seed);
    if let Some(f) = &o.full {
        line += &format!(" full-rank {} it {:.3}s;", f.iterations, f.wall_seconds);
    }
    if let Some(l) = &o.low {
        line += &format!(" low-rank {} it {:.3}s rank {};", l.iterations, l.wall_seconds, o.rank().unwrap_or(0));
    }
    if let Some(cr) = o.compression_ratio() {
        line += &format!(" compression {:.2}%;", 100.0 * cr);
    }
    if let Some(c) = &o.comparison {
        line += &format!(" speedup {:.3} phi diff {:.3e}", c.speedup, c.phi_diff);
        if let Some(d) = c.psi_diff {
            line += &format!(" psi diff {d:.3e}");
        }
    }
    println!("{line}");
}

fn execute(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Presets => {
            for name in PRESET_NAMES {
                let p = Preset::from_name(name, 100.0, 2)?;
                println!("{name:<20} {}", p.describe());
            }
            Ok(())
        }
        Command::ShowConfig(args) => {
            print!("{}", args.resolve()?.to_text());
            Ok(())
        }
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let outcome = run(&cfg)?;
            summary(0, &outcome);
            write_outputs(std::slice::from_ref(&outcome), &args.out)
        }
        Command::Batch { args, seeds } => {
            let base = args.resolve()?;
            let mut outcomes = Vec::with_capacity(seeds.len());
            for (id, seed) in seeds.into_iter().enumerate() {
                let mut cfg = base.clone();
                cfg.lowrank.seed = seed;
                let o = run(&cfg)?;
                summary(id, &o);
                outcomes.push(o);
            }
            write_outputs(&outcomes, &args.out)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
