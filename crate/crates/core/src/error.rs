//! Error types shared across the crate.

use thiserror::Error;

/// Rejected configuration, grid, parameter, or initial-condition input.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("grid: {0}")]
    Grid(String),
    #[error("params: {0}")]
    Params(String),
    #[error("initial condition: {0}")]
    InitialCondition(String),
    #[error("solver config: {0}")]
    Solver(String),
    #[error("monitor config: {0}")]
    Monitor(String),
    #[error("config file {path}: {reason}")]
    File { path: String, reason: String },
    #[error("field file: {0}")]
    FieldFile(String),
}

/// Failures of the explicit scheme itself: lost positivity, lost finiteness,
/// or a stability time step below the configured floor.
#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("non-finite value in {field} at t = {t}")]
    NonFinite { field: &'static str, t: f64 },
    #[error(
        "{field} negative beyond round-off at t = {t}: min {min:e} exceeds allowance {allow:e}"
    )]
    NegativeValue { field: &'static str, min: f64, allow: f64, t: f64 },
    #[error("stable time step {needed:e} fell below dt_floor {floor:e} at t = {t}")]
    TimeStepCollapse { needed: f64, floor: f64, t: f64 },
}

impl SchemeError {
    /// True for the dt-floor signal, which callers treat as suspected
    /// blow-up or loss of resolution rather than a hard failure.
    pub fn is_timestep_collapse(&self) -> bool {
        matches!(self, SchemeError::TimeStepCollapse { .. })
    }
}

/// Pressure-solve failures.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("pressure solve did not converge: residual {residual:e} after {iterations} iterations (tol {tol:e})")]
    NoConvergence {
        residual: f64,
        iterations: usize,
        tol: f64,
    },
    #[error("FFT Poisson solver requires periodic boundaries")]
    FftNeedsPeriodic,
}

/// Either failure mode of a full velocity step.
#[derive(Debug, Error)]
pub enum StepError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Rejected input to the exact-arithmetic estimate checks.
#[derive(Debug, Error)]
pub enum EstimatesError {
    #[error("dimension must be >= 1, got {0}")]
    BadDimension(i64),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("{0}")]
    InvalidQuery(String),
    #[error("interpolation balance is degenerate: coefficient of the exponent is zero")]
    DegenerateBalance,
    #[error("no admissible threshold: {0}")]
    NoThreshold(String),
}

/// Top-level error for scenario orchestration.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("step {step}: {source}")]
    Scheme { step: u64, source: SchemeError },
    #[error("step {step}: {source}")]
    Solver { step: u64, source: SolverError },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}
