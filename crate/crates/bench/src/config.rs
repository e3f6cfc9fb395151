//! Run configuration and its flat `key = value` text format.
//!
//! ```text
//! # comment
//! name = pin-cell
//! mode = both
//! domain.x_left = -1
//! mesh.nx = 40
//! material.sigma_s = box(-0.5, 0.5, -0.5, 0.5, 0.1, 100)
//! ```
//!
//! Unknown keys are errors. Keys missing from a file keep their defaults.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rte_core::ProblemSetup;
use rte_core::{LowRankParams, SolverParams};

/// Configuration or preset error.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("{0}")]
    Invalid(String),
}

/// Which drivers to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Full,
    LowRank,
    Both,
}

impl Mode {
    pub fn runs_full(self) -> bool {
        matches!(self, Mode::Full | Mode::Both)
    }

    pub fn runs_low_rank(self) -> bool {
        matches!(self, Mode::LowRank | Mode::Both)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::LowRank => "lowrank",
            Mode::Both => "both",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Mode::Full),
            "lowrank" => Ok(Mode::LowRank),
            "both" => Ok(Mode::Both),
            other => Err(format!("expected full, lowrank or both, got `{other}`")),
        }
    }
}

/// Closed-form scalar fields used by the benchmark problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSpec {
    Constant(f64),
    /// `amplitude * exp(-rate (x^2 + y^2))`.
    Gaussian { amplitude: f64, rate: f64 },
    /// `inside` on `[x0, x1] x [y0, y1]`, `outside` elsewhere.
    Box { x0: f64, x1: f64, y0: f64, y1: f64, inside: f64, outside: f64 },
    /// `99.9 r^4 (r^2 - 2)^2 + 0.1` for `r ≤ 1`, `100` beyond.
    VariableScattering,
    /// `inside` on the lattice absorber blocks, `outside` elsewhere.
    LatticeAbsorber { inside: f64, outside: f64 },
}

/// Unit cells `[a, a+1] x [b, b+1]` of the lattice domain `[0, 5]^2` that absorb.
pub const LATTICE_ABSORBERS: [(f64, f64); 4] = [(1.0, 1.0), (3.0, 1.0), (1.0, 3.0), (3.0, 3.0)];

impl FieldSpec {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            FieldSpec::Constant(v) => v,
            FieldSpec::Gaussian { amplitude, rate } => amplitude * (-rate * (x * x + y * y)).exp(),
            FieldSpec::Box { x0, x1, y0, y1, inside, outside } => {
                if x >= x0 && x <= x1 && y >= y0 && y <= y1 {
                    inside
                } else {
                    outside
                }
            }
            FieldSpec::VariableScattering => {
                let r2 = x * x + y * y;
                if r2 <= 1.0 {
                    99.9 * r2 * r2 * (r2 - 2.0).powi(2) + 0.1
                } else {
                    100.0
                }
            }
            FieldSpec::LatticeAbsorber { inside, outside } => {
                let hit = LATTICE_ABSORBERS.iter().any(|&(a, b)| x >= a && x <= a + 1.0 && y >= b && y <= b + 1.0);
                if hit {
                    inside
                } else {
                    outside
                }
            }
        }
    }

    pub fn to_field(self) -> rte_core::Field {
        Arc::new(move |x, y| self.eval(x, y))
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FieldSpec::Constant(v) => write!(f, "constant({v:?})"),
            FieldSpec::Gaussian { amplitude, rate } => write!(f, "gaussian({amplitude:?}, {rate:?})"),
            FieldSpec::Box { x0, x1, y0, y1, inside, outside } => {
                write!(f, "box({x0:?}, {x1:?}, {y0:?}, {y1:?}, {inside:?}, {outside:?})")
            }
            FieldSpec::VariableScattering => write!(f, "variable_scattering()"),
            FieldSpec::LatticeAbsorber { inside, outside } => write!(f, "lattice_absorber({inside:?}, {outside:?})"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| format!("expected name(args), got `{s}`"))?;
        if !s.ends_with(')') {
            return Err(format!("missing `)` in `{s}`"));
        }
        let name = s[..open].trim();
        let inner = s[open + 1..s.len() - 1].trim();
        let args: Vec<f64> = if inner.is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|e| format!("bad number `{}`: {e}", a.trim())))
                .collect::<Result<_, _>>()?
        };
        let want = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(format!("`{name}` takes {n} arguments, got {}", args.len()))
            }
        };
        match name {
            "constant" => want(1).map(|_| FieldSpec::Constant(args[0])),
            "gaussian" => want(2).map(|_| FieldSpec::Gaussian { amplitude: args[0], rate: args[1] }),
            "box" => want(6).map(|_| FieldSpec::Box {
                x0: args[0],
                x1: args[1],
                y0: args[2],
                y1: args[3],
                inside: args[4],
                outside: args[5],
            }),
            "variable_scattering" => want(0).map(|_| FieldSpec::VariableScattering),
            "lattice_absorber" => want(2).map(|_| FieldSpec::LatticeAbsorber { inside: args[0], outside: args[1] }),
            other => Err(format!("unknown field `{other}`")),
        }
    }
}

/// Complete description of one benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub mode: Mode,
    pub x_left: f64,
    pub x_right: f64,
    pub y_bottom: f64,
    pub y_top: f64,
    pub nx: usize,
    pub ny: usize,
    pub degree: usize,
    pub n_theta: usize,
    pub n_omega_z: usize,
    pub sigma_s: FieldSpec,
    pub sigma_a: FieldSpec,
    pub source: FieldSpec,
    pub inflow: FieldSpec,
    pub solver: SolverParams,
    pub lowrank: LowRankParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            name: "custom".into(),
            mode: Mode::Both,
            x_left: -1.0,
            x_right: 1.0,
            y_bottom: -1.0,
            y_top: 1.0,
            nx: 32,
            ny: 32,
            degree: 1,
            n_theta: 16,
            n_omega_z: 8,
            sigma_s: FieldSpec::Constant(1.0),
            sigma_a: FieldSpec::Constant(0.0),
            source: FieldSpec::Gaussian { amplitude: 1.0, rate: 100.0 },
            inflow: FieldSpec::Constant(0.0),
            solver: SolverParams::default(),
            lowrank: LowRankParams::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError::InvalidValue { key: key.into(), message: e.to_string() })
}

impl RunConfig {
    /// Serializes every field, one `key = value` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        line("name", self.name.clone());
        line("mode", self.mode.to_string());
        line("domain.x_left", format!("{:?}", self.x_left));
        line("domain.x_right", format!("{:?}", self.x_right));
        line("domain.y_bottom", format!("{:?}", self.y_bottom));
        line("domain.y_top", format!("{:?}", self.y_top));
        line("mesh.nx", self.nx.to_string());
        line("mesh.ny", self.ny.to_string());
        line("mesh.degree", self.degree.to_string());
        line("quadrature.n_theta", self.n_theta.to_string());
        line("quadrature.n_omega_z", self.n_omega_z.to_string());
        line("material.sigma_s", self.sigma_s.to_string());
        line("material.sigma_a", self.sigma_a.to_string());
        line("source", self.source.to_string());
        line("boundary.inflow", self.inflow.to_string());
        line("solver.tolerance", format!("{:?}", self.solver.tolerance));
        line("solver.max_iterations", self.solver.max_iterations.to_string());
        line("solver.dsa", self.solver.use_dsa.to_string());
        line("solver.store_psi", self.solver.store_psi.to_string());
        line("lowrank.p", self.lowrank.p.to_string());
        line("lowrank.q", self.lowrank.q.to_string());
        line("lowrank.eps_res", format!("{:?}", self.lowrank.eps_res));
        line("lowrank.eps_diff", format!("{:?}", self.lowrank.eps_diff));
        line("lowrank.eps_svd", format!("{:?}", self.lowrank.eps_svd));
        line("lowrank.eps_mgs", format!("{:?}", self.lowrank.eps_mgs));
        line("lowrank.drop_tolerance", format!("{:?}", self.lowrank.drop_tolerance));
        line("lowrank.seed", self.lowrank.seed.to_string());
        out
    }

    /// Parses a config file on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, message: format!("expected `key = value`, got `{line}`") })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "name" => self.name = value.to_string(),
            "mode" => self.mode = parse(key, value)?,
            "domain.x_left" => self.x_left = parse(key, value)?,
            "domain.x_right" => self.x_right = parse(key, value)?,
            "domain.y_bottom" => self.y_bottom = parse(key, value)?,
            "domain.y_top" => self.y_top = parse(key, value)?,
            "mesh.nx" => self.nx = parse(key, value)?,
            "mesh.ny" => self.ny = parse(key, value)?,
            "mesh.degree" => self.degree = parse(key, value)?,
            "quadrature.n_theta" => self.n_theta = parse(key, value)?,
            "quadrature.n_omega_z" => self.n_omega_z = parse(key, value)?,
            "material.sigma_s" => self.sigma_s = parse(key, value)?,
            "material.sigma_a" => self.sigma_a = parse(key, value)?,
            "source" => self.source = parse(key, value)?,
            "boundary.inflow" => self.inflow = parse(key, value)?,
            "solver.tolerance" => self.solver.tolerance = parse(key, value)?,
            "solver.max_iterations" => self.solver.max_iterations = parse(key, value)?,
            "solver.dsa" => self.solver.use_dsa = parse(key, value)?,
            "solver.store_psi" => self.solver.store_psi = parse(key, value)?,
            "lowrank.p" => self.lowrank.p = parse(key, value)?,
            "lowrank.q" => self.lowrank.q = parse(key, value)?,
            "lowrank.eps_res" => self.lowrank.eps_res = parse(key, value)?,
            "lowrank.eps_diff" => self.lowrank.eps_diff = parse(key, value)?,
            "lowrank.eps_svd" => self.lowrank.eps_svd = parse(key, value)?,
            "lowrank.eps_mgs" => self.lowrank.eps_mgs = parse(key, value)?,
            "lowrank.drop_tolerance" => self.lowrank.drop_tolerance = parse(key, value)?,
            "lowrank.seed" => self.lowrank.seed = parse(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.x_left < self.x_right && self.y_bottom < self.y_top) {
            return bad("domain bounds must be increasing".into());
        }
        if self.nx == 0 || self.ny == 0 || self.n_theta == 0 || self.n_omega_z == 0 {
            return bad("mesh and quadrature sizes must be positive".into());
        }
        if self.degree == 0 {
            return bad("mesh.degree must be at least 1".into());
        }
        if !(self.solver.tolerance > 0.0) || self.solver.max_iterations == 0 {
            return bad("solver tolerance and max_iterations must be positive".into());
        }
        if self.mode.runs_low_rank() {
            self.lowrank
                .validate(self.n_theta * self.n_omega_z)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(())
    }

    pub fn n_angles(&self) -> usize {
        self.n_theta * self.n_omega_z
    }

    /// Spatial DOF count `nx * ny * (K + 1)^2`.
    pub fn n_dofs(&self) -> usize {
        self.nx * self.ny * (self.degree + 1) * (self.degree + 1)
    }

    pub fn setup(&self) -> ProblemSetup {
        ProblemSetup {
            x_left: self.x_left,
            x_right: self.x_right,
            y_bottom: self.y_bottom,
            y_top: self.y_top,
            nx: self.nx,
            ny: self.ny,
            n_theta: self.n_theta,
            n_omega_z: self.n_omega_z,
            degree: self.degree,
            sigma_s: self.sigma_s.to_field(),
            sigma_a: self.sigma_a.to_field(),
            source: self.source.to_field(),
            inflow: self.inflow.to_field(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_specs_round_trip() {
        for spec in [
            FieldSpec::Constant(0.1),
            FieldSpec::Gaussian { amplitude: 1.0, rate: 100.0 },
            FieldSpec::Box { x0: -0.5, x1: 0.5, y0: -0.5, y1: 0.5, inside: 0.1, outside: 100.0 },
            FieldSpec::VariableScattering,
            FieldSpec::LatticeAbsorber { inside: 100.0, outside: 0.0 },
        ] {
            assert_eq!(spec.to_string().parse::<FieldSpec>().unwrap(), spec);
        }
        assert!("nope(1)".parse::<FieldSpec>().is_err());
        assert!("constant(1, 2)".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn variable_scattering_values() {
        let f = FieldSpec::VariableScattering;
        assert!((f.eval(0.0, 0.0) - 0.1).abs() < 1e-15);
        assert!((f.eval(1.0, 0.0) - 100.0).abs() < 1e-12);
        assert!((f.eval(0.6, 0.8) - 100.0).abs() < 1e-12);
        assert_eq!(f.eval(1.0, 1.0), 100.0);
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.sigma_s = FieldSpec::Box { x0: -0.5, x1: 0.5, y0: -0.5, y1: 0.5, inside: 0.1, outside: 100.0 };
        cfg.lowrank.seed = 17;
        cfg.lowrank.eps_res = 3.3e-7;
        let back = RunConfig::from_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn errors_are_reported() {
        assert!(matches!(RunConfig::from_text("mesh.nx 3"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(RunConfig::from_text("mesh.nz = 3"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(RunConfig::from_text("mesh.nx = x"), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(RunConfig::from_text("lowrank.p = 9\nlowrank.q = 8"), Err(ConfigError::Invalid(_))));
        let cfg = RunConfig::from_text("# only a comment\n\nmesh.nx = 8 # trailing\n").unwrap();
        assert_eq!(cfg.nx, 8);
    }
}
