//! Physical and numerical parameters of a run.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::field::ScalarField;
use crate::grid::GridSpec;

/// Gravitational-type potential driving the buoyancy force `n ∇φ`.
///
/// The linear variant carries its gradient analytically, so a uniform force
/// works on the torus as well, where wrapped differences of a linear sample
/// would see the seam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Potential {
    Zero,
    Linear { gradient: Vec<f64> },
}

impl Potential {
    pub fn validate(&self, dim: usize) -> Result<(), ConfigError> {
        match self {
            Potential::Zero => Ok(()),
            Potential::Linear { gradient } => {
                if gradient.len() != dim {
                    return Err(ConfigError::Params(format!(
                        "potential gradient length {} does not match dim {dim}",
                        gradient.len()
                    )));
                }
                if gradient.iter().any(|g| !g.is_finite()) {
                    return Err(ConfigError::Params("potential gradient must be finite".into()));
                }
                Ok(())
            }
        }
    }

    /// φ sampled at cell centers (linear potentials are anchored at 0).
    pub fn sample(&self, grid: &GridSpec) -> ScalarField {
        match self {
            Potential::Zero => ScalarField::zeros(grid),
            Potential::Linear { gradient } => {
                let g = gradient.clone();
                ScalarField::from_fn(grid, move |x| {
                    (0..g.len()).map(|a| g[a] * x[a]).sum()
                })
            }
        }
    }

    /// ∂φ/∂x_axis, constant for the supported potentials.
    pub fn gradient_component(&self, axis: usize) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Linear { gradient } => gradient[axis],
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::Linear { gradient } => gradient.iter().all(|g| *g == 0.0),
        }
    }
}

fn default_cfl_adv() -> f64 {
    0.2
}
fn default_cfl_diff() -> f64 {
    0.45
}
fn default_eps() -> f64 {
    1e-3
}
fn default_dt_floor() -> f64 {
    1e-10
}
fn default_true() -> bool {
    true
}
fn default_potential() -> Potential {
    Potential::Zero
}

/// Model and scheme constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Nonlinear diffusion exponent, m > 1.
    pub m: f64,
    /// Regularization of the degenerate diffusion: the density equation is
    /// integrated with diffusive flux −∇(n+eps)^m. Must lie in (0, 1).
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_potential")]
    pub phi: Potential,
    /// Safety factor on the advective time-step bound, in (0, 1].
    #[serde(default = "default_cfl_adv")]
    pub cfl_adv: f64,
    /// Safety factor on the diffusive time-step bound, in (0, 1].
    #[serde(default = "default_cfl_diff")]
    pub cfl_diff: f64,
    pub t_end: f64,
    /// A stable dt below this floor is treated as suspected blow-up.
    #[serde(default = "default_dt_floor")]
    pub dt_floor: f64,
    /// Include the chemotactic drift −∇·(n∇c) in the density equation.
    #[serde(default = "default_true")]
    pub chemotaxis: bool,
    /// Evolve the signal equation (otherwise c stays frozen).
    #[serde(default = "default_true")]
    pub evolve_signal: bool,
    /// Evolve the Stokes equations (otherwise u, p stay frozen).
    #[serde(default = "default_true")]
    pub evolve_flow: bool,
}

impl Params {
    pub fn validate(&self, grid: &GridSpec) -> Result<(), ConfigError> {
        if !(self.m > 1.0) || !self.m.is_finite() {
            return Err(ConfigError::Params(format!("m must be > 1, got {}", self.m)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(ConfigError::Params(format!("eps must lie in (0,1), got {}", self.eps)));
        }
        for (name, v) in [("cfl_adv", self.cfl_adv), ("cfl_diff", self.cfl_diff)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(ConfigError::Params(format!("{name} must lie in (0,1], got {v}")));
            }
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(ConfigError::Params(format!("t_end must be > 0, got {}", self.t_end)));
        }
        if !(self.dt_floor > 0.0) || !self.dt_floor.is_finite() {
            return Err(ConfigError::Params(format!(
                "dt_floor must be > 0, got {}",
                self.dt_floor
            )));
        }
        self.phi.validate(grid.dim)?;
        Ok(())
    }
}

impl Default for Params {
    fn default() -> Self {
        Params {
            m: 1.5,
            eps: default_eps(),
            phi: default_potential(),
            cfl_adv: default_cfl_adv(),
            cfl_diff: default_cfl_diff(),
            t_end: 1.0,
            dt_floor: default_dt_floor(),
            chemotaxis: true,
            evolve_signal: true,
            evolve_flow: true,
        }
    }
}

/// `x^m` with fast paths for the exponents the study sweeps hit hardest.
#[inline]
pub(crate) fn pow_m(x: f64, m: f64) -> f64 {
    if m == 1.0 {
        x
    } else if m == 2.0 {
        x * x
    } else if m == 1.5 {
        x * x.sqrt()
    } else if m == 0.5 {
        x.sqrt()
    } else {
        x.powf(m)
    }
}
