//! The four benchmark problems.
//!
//! Homogeneous problems are sized by the refinement level `L`
//! (`16L x 16L` cells, `CL(8L, 4L)`). The other three default to a reduced
//! `40 x 40`, `CL(16, 8)` resolution; `full_scale` selects the `80 x 80` meshes
//! with `CL(40, 20)` (variable scattering) or `CL(32, 16)` (pin cell, lattice).

use crate::config::{ConfigError, FieldSpec, Mode, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    Homogeneous { sigma_s: f64, level: usize },
    VariableScattering,
    PinCell,
    Lattice,
}

/// Names accepted by [`Preset::from_name`].
pub const PRESET_NAMES: [&str; 4] = ["homogeneous", "variable-scattering", "pin-cell", "lattice"];

impl Preset {
    /// Looks a preset up by name; `sigma_s` and `level` only apply to `homogeneous`.
    pub fn from_name(name: &str, sigma_s: f64, level: usize) -> Result<Self, ConfigError> {
        match name {
            "homogeneous" => Ok(Preset::Homogeneous { sigma_s, level }),
            "variable-scattering" => Ok(Preset::VariableScattering),
            "pin-cell" => Ok(Preset::PinCell),
            "lattice" => Ok(Preset::Lattice),
            other => Err(ConfigError::UnknownPreset(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Homogeneous { .. } => "homogeneous",
            Preset::VariableScattering => "variable-scattering",
            Preset::PinCell => "pin-cell",
            Preset::Lattice => "lattice",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Preset::Homogeneous { .. } => "[-1,1]^2, constant sigma_s, no absorption, Gaussian source; 16L x 16L cells, CL(8L,4L)",
            Preset::VariableScattering => "[-1,1]^2, sigma_s rising smoothly from 0.1 at the centre to 100, Gaussian source",
            Preset::PinCell => "[-1,1]^2, sigma_s = 0.1 on |x|,|y| <= 0.5 and 100 elsewhere, Gaussian source",
            Preset::Lattice => "[0,5]^2, four pure absorbers (sigma_a = 100) in a scattering medium, unit source in [2,3]^2",
        }
    }

    pub fn config(&self, full_scale: bool) -> Result<RunConfig, ConfigError> {
        let gaussian = FieldSpec::Gaussian { amplitude: 1.0, rate: 100.0 };
        let (cells, quad) = match self {
            Preset::Homogeneous { level, .. } => {
                if *level == 0 {
                    return Err(ConfigError::Invalid("refinement level must be at least 1".into()));
                }
                (16 * level, (8 * level, 4 * level))
            }
            Preset::VariableScattering if full_scale => (80, (40, 20)),
            Preset::PinCell | Preset::Lattice if full_scale => (80, (32, 16)),
            _ => (40, (16, 8)),
        };
        let mut cfg = RunConfig {
            name: self.name().to_string(),
            mode: Mode::Both,
            nx: cells,
            ny: cells,
            n_theta: quad.0,
            n_omega_z: quad.1,
            source: gaussian,
            ..RunConfig::default()
        };
        match *self {
            Preset::Homogeneous { sigma_s, .. } => {
                if !(sigma_s >= 0.0) {
                    return Err(ConfigError::Invalid(format!("sigma_s must be nonnegative, got {sigma_s}")));
                }
                cfg.sigma_s = FieldSpec::Constant(sigma_s);
            }
            Preset::VariableScattering => cfg.sigma_s = FieldSpec::VariableScattering,
            Preset::PinCell => {
                cfg.sigma_s = FieldSpec::Box { x0: -0.5, x1: 0.5, y0: -0.5, y1: 0.5, inside: 0.1, outside: 100.0 };
            }
            Preset::Lattice => {
                cfg.x_left = 0.0;
                cfg.x_right = 5.0;
                cfg.y_bottom = 0.0;
                cfg.y_top = 5.0;
                cfg.sigma_s = FieldSpec::LatticeAbsorber { inside: 0.0, outside: 1.0 };
                cfg.sigma_a = FieldSpec::LatticeAbsorber { inside: 100.0, outside: 0.0 };
                cfg.source = FieldSpec::Box { x0: 2.0, x1: 3.0, y0: 2.0, y1: 3.0, inside: 1.0, outside: 0.0 };
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
