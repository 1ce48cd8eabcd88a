//! Finite-volume simulator for a chemotaxis-Stokes system with
//! porous-medium diffusion
//! (`n_t + u·∇n = Δ(n+eps)^m − ∇·(n∇c)`,
//! `c_t + u·∇c = Δc − c + n`, `u_t + ∇P = Δu + n∇φ`, `∇·u = 0`),
//! plus an exact rational-arithmetic checker for the exponent algebra the
//! boundedness analysis of this system rests on.
//!
//! The scheme is a fully explicit conservative MAC discretization: donor-cell
//! upwinding for advection and chemotactic drift, central differences for the
//! regularized diffusion, Chorin projection for the Stokes part, and an
//! adaptive CFL-bounded time step. Discrete mass conservation, positivity,
//! and the divergence-free constraint are runtime-checked invariants, and the
//! [`monitors`] module records the functionals whose boundedness a global
//! solution must exhibit.
//!
//! By default the cell kernels run data-parallel on rayon; building with
//! `--no-default-features` gives a sequential fallback. Reductions accumulate
//! in fixed chunks either way, so results are bitwise reproducible across
//! thread counts and both builds.

pub mod config;
pub mod error;
pub mod estimates;
pub mod field;
pub mod grid;
pub mod monitors;
pub mod ops;
pub mod params;
pub mod report;
pub mod runner;
pub mod state;
pub mod stokes;
pub mod timestep;
pub mod transport;

mod fft;
mod par;

pub use config::{load_config, MonitorConfig, RunConfig, SolverConfig};
pub use error::{ConfigError, EstimatesError, RunError, SchemeError, SolverError};
pub use field::{FluxField, ScalarField, VectorField};
pub use grid::{Bc, GridSpec};
pub use monitors::{MonitorRecord, Verdict, VerdictConfig, VerdictKind};
pub use params::{Params, Potential};
pub use report::RunReport;
pub use runner::{run_single, simulate, sweep_m};
pub use state::{init_state, GaussianBump, InitialConditionSpec, State};
pub use stokes::{
    pressure_poisson, project, step_velocity, step_velocity_with_forcing, PoissonMethod,
    PoissonSolver,
};
pub use timestep::cfl_dt;
pub use transport::{advective_flux, chemotaxis_flux, porous_diffusion_flux, step_density, step_signal};
