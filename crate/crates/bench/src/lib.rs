//! Benchmark harness for the full-rank and low-rank transport solvers.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{ConfigError, FieldSpec, Mode, RunConfig};
pub use presets::Preset;
pub use run::{run, Comparison, RunError, RunOutcome};
