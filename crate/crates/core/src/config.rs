//! Run configuration: one TOML or JSON document mirroring the domain types.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::grid::GridSpec;
use crate::monitors::VerdictConfig;
use crate::params::Params;
use crate::state::InitialConditionSpec;
use crate::stokes::{PoissonMethod, PoissonSolver};

/// Pressure-solver selection; `Auto` picks FFT on periodic grids and CG on
/// boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SolverMethodConfig {
    #[default]
    Auto,
    Fft,
    Cg,
}

fn default_solver_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    20_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(default)]
    pub method: SolverMethodConfig,
    #[serde(default = "default_solver_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: SolverMethodConfig::Auto,
            tol: default_solver_tol(),
            max_iter: default_max_iter(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, grid: &GridSpec) -> Result<(), ConfigError> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(ConfigError::Solver(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(ConfigError::Solver("max_iter must be at least 1".into()));
        }
        if self.method == SolverMethodConfig::Fft && !grid.periodic() {
            return Err(ConfigError::Solver("FFT solver requires periodic boundaries".into()));
        }
        Ok(())
    }

    pub fn build(&self, grid: &GridSpec) -> PoissonSolver {
        let method = match self.method {
            SolverMethodConfig::Fft => PoissonMethod::Fft,
            SolverMethodConfig::Cg => PoissonMethod::Cg,
            SolverMethodConfig::Auto => {
                if grid.periodic() {
                    PoissonMethod::Fft
                } else {
                    PoissonMethod::Cg
                }
            }
        };
        PoissonSolver::new(method, self.tol, self.max_iter)
    }
}

fn default_p_list() -> Vec<f64> {
    vec![2.0, 3.0]
}
fn default_record_every() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorConfig {
    /// Exponents for the recorded Lp norms of the density.
    #[serde(default = "default_p_list")]
    pub p_list: Vec<f64>,
    /// Record a monitor row every this many steps (>= 1).
    #[serde(default = "default_record_every")]
    pub record_every: usize,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        MonitorConfig { p_list: default_p_list(), record_every: default_record_every() }
    }
}

impl MonitorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.record_every == 0 {
            return Err(ConfigError::Monitor("record_every must be >= 1".into()));
        }
        if self.p_list.iter().any(|p| !(*p >= 1.0) || !p.is_finite()) {
            return Err(ConfigError::Monitor("every monitored p must be finite and >= 1".into()));
        }
        Ok(())
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Everything one reproducible run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub params: Params,
    pub ic: InitialConditionSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub monitor: MonitorConfig,
    #[serde(default)]
    pub verdict: VerdictConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Drives the perturbation generator; a seed fully determines random
    /// initial data.
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid.validate()?;
        self.params.validate(&self.grid)?;
        self.ic.validate(&self.grid)?;
        self.solver.validate(&self.grid)?;
        self.monitor.validate()?;
        Ok(())
    }

    /// The verdict thresholds with the run's dt_floor and t_end filled in.
    pub fn effective_verdict(&self) -> VerdictConfig {
        VerdictConfig {
            dt_floor: self.params.dt_floor,
            t_end: self.params.t_end,
            ..self.verdict.clone()
        }
    }
}

/// Load a config from TOML (default) or JSON (by `.json` extension).
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::File {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let config: RunConfig = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| ConfigError::File {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?
    } else {
        toml::from_str(&text).map_err(|e| ConfigError::File {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?
    };
    config.validate()?;
    Ok(config)
}
