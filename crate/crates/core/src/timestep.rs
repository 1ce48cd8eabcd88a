//! Adaptive time-step control for the explicit scheme.

use crate::error::SchemeError;
use crate::ops;
use crate::params::{pow_m, Params};
use crate::state::State;

/// Floor on the speed scale so a quiescent state yields a huge (then
/// diffusion-limited) advective bound instead of a division by zero.
const TINY_SPEED: f64 = 1e-30;

/// Stable explicit time step for the current state:
///
/// `dt = min(cfl_adv * h / max(|u|, |∇c|, tiny), cfl_diff * h² / (2 N D))`
///
/// with `D = max(m (max n + eps)^{m-1}, 1)` covering the nonlinear density
/// diffusivity, the unit signal diffusivity, and the unit viscosity. The
/// result is capped by the time remaining to `t_end`. A stability step below
/// `dt_floor` signals suspected blow-up (or loss of resolution) instead of
/// returning.
pub fn cfl_dt(state: &State, params: &Params) -> Result<f64, SchemeError> {
    state.n.check_finite("n", state.t)?;
    state.c.check_finite("c", state.t)?;
    state.u.check_finite("u", state.t)?;

    let grid = state.n.grid();
    let h = grid.min_spacing();

    let speed = state
        .u
        .max_abs()
        .max(ops::face_gradient_inf_norm(&state.c))
        .max(TINY_SPEED);
    let d_max = (params.m * pow_m(state.n.max().max(0.0) + params.eps, params.m - 1.0)).max(1.0);

    let dt_adv = params.cfl_adv * h / speed;
    let dt_diff = params.cfl_diff * h * h / (2.0 * grid.dim as f64 * d_max);
    let dt = dt_adv.min(dt_diff);

    if dt < params.dt_floor {
        return Err(SchemeError::TimeStepCollapse {
            needed: dt,
            floor: params.dt_floor,
            t: state.t,
        });
    }
    Ok(dt.min(params.t_end - state.t))
}
