//! Explicit conservative steppers for the density and signal equations.
//!
//! Density: `n_t + u·∇n = Δ(n+eps)^m − ∇·(n∇c)`, integrated in flux form so
//! the discrete mass telescopes exactly. Signal: `c_t + u·∇c = Δc − c + n`.
//! All face fluxes are physical fluxes in the positive axis direction; the
//! update is `q -= dt · div_h(flux)` plus reaction terms.

use crate::error::SchemeError;
use crate::field::{FluxField, ScalarField, VectorField};
use crate::ops;
use crate::par;
use crate::params::{pow_m, Params};
use crate::state::State;

/// Negative values no larger than this fraction of the sup norm are
/// round-off and get clipped to zero; anything bigger is a scheme failure.
pub const NEG_CLIP_REL: f64 = 1e-14;

/// Diffusive face flux `−∇_h (n+eps)^m`; its negative divergence is the
/// discrete `Δ(n+eps)^m`. Wall faces carry zero flux (homogeneous Neumann).
pub fn porous_diffusion_flux(n: &ScalarField, m: f64, eps: f64) -> FluxField {
    let mut flux = FluxField::zeros(n.grid());
    add_porous_diffusion(&mut flux, n, m, eps);
    flux
}

/// Chemotactic drift flux `n_up · ∇_h c`: the face drift velocity is the
/// central difference of c and the density is donor-cell upwinded on its
/// sign. Zero on wall faces.
pub fn chemotaxis_flux(n: &ScalarField, c: &ScalarField) -> FluxField {
    let mut flux = FluxField::zeros(n.grid());
    add_chemotaxis(&mut flux, n, c);
    flux
}

/// First-order upwind advective flux `u_face · q_up`. Zero on wall faces
/// (no-slip velocity).
pub fn advective_flux(q: &ScalarField, u: &VectorField) -> FluxField {
    let mut flux = FluxField::zeros(q.grid());
    add_advection(&mut flux, q, u);
    flux
}

pub(crate) fn add_porous_diffusion(flux: &mut FluxField, n: &ScalarField, m: f64, eps: f64) {
    let grid = flux.grid().clone();
    // psi = (n+eps)^m once per cell; the flux reads it twice per axis
    let nd = n.data();
    let mut psi = vec![0.0; nd.len()];
    par::fill_with(&mut psi, |i| pow_m(nd[i] + eps, m));
    let cshape = grid.cell_shape();
    let periodic = grid.periodic();
    for a in 0..grid.dim {
        let fshape = grid.face_shape(a);
        let h = grid.spacing(a);
        let mc = grid.cells[a];
        let psi = &psi;
        par::update_with(flux.comp_mut(a), |idx, v| {
            let mut fc = fshape.decode(idx);
            let f = fc[a];
            if !periodic && (f == 0 || f == mc) {
                return v;
            }
            let right = cshape.index(fc);
            fc[a] = if f == 0 { mc - 1 } else { f - 1 };
            let left = cshape.index(fc);
            v - (psi[right] - psi[left]) / h
        });
    }
}

pub(crate) fn add_chemotaxis(flux: &mut FluxField, n: &ScalarField, c: &ScalarField) {
    let grid = flux.grid().clone();
    let nd = n.data();
    let cd = c.data();
    let cshape = grid.cell_shape();
    let periodic = grid.periodic();
    for a in 0..grid.dim {
        let fshape = grid.face_shape(a);
        let h = grid.spacing(a);
        let mc = grid.cells[a];
        par::update_with(flux.comp_mut(a), |idx, v| {
            let mut fc = fshape.decode(idx);
            let f = fc[a];
            if !periodic && (f == 0 || f == mc) {
                return v;
            }
            let right = cshape.index(fc);
            fc[a] = if f == 0 { mc - 1 } else { f - 1 };
            let left = cshape.index(fc);
            let drift = (cd[right] - cd[left]) / h;
            let upwind = if drift > 0.0 { nd[left] } else { nd[right] };
            v + upwind * drift
        });
    }
}

pub(crate) fn add_advection(flux: &mut FluxField, q: &ScalarField, u: &VectorField) {
    let grid = flux.grid().clone();
    let qd = q.data();
    let cshape = grid.cell_shape();
    let periodic = grid.periodic();
    for a in 0..grid.dim {
        let fshape = grid.face_shape(a);
        let mc = grid.cells[a];
        let uc = u.comp(a);
        par::update_with(flux.comp_mut(a), |idx, v| {
            let mut fc = fshape.decode(idx);
            let f = fc[a];
            if !periodic && (f == 0 || f == mc) {
                return v; // no-slip wall: no transport
            }
            let vel = uc[idx];
            let right = cshape.index(fc);
            fc[a] = if f == 0 { mc - 1 } else { f - 1 };
            let left = cshape.index(fc);
            let upwind = if vel > 0.0 { qd[left] } else { qd[right] };
            v + vel * upwind
        });
    }
}

/// Outcome of [`step_density`]: the updated field plus how many cells were
/// clipped from round-off-negative back to zero.
#[derive(Debug)]
pub struct DensityStep {
    pub n: ScalarField,
    pub clipped: usize,
}

/// One explicit Euler step of the density equation. `dt` must satisfy the
/// [`crate::timestep::cfl_dt`] bound; under it the update is a convex
/// combination and stays nonnegative up to round-off.
pub fn step_density(state: &State, dt: f64, params: &Params) -> Result<DensityStep, SchemeError> {
    let grid = state.n.grid().clone();
    let mut flux = FluxField::zeros(&grid);
    add_porous_diffusion(&mut flux, &state.n, params.m, params.eps);
    if params.chemotaxis {
        add_chemotaxis(&mut flux, &state.n, &state.c);
    }
    add_advection(&mut flux, &state.n, &state.u);

    let mut out = ScalarField::zeros(&grid);
    {
        let comps: Vec<&[f64]> = (0..grid.dim).map(|a| flux.comp(a)).collect();
        ops::fill_divergence(&grid, &comps, out.data_mut());
    }
    let nd = state.n.data();
    par::update_with(out.data_mut(), |i, div| nd[i] - dt * div);

    let allow = NEG_CLIP_REL * state.n.max_abs();
    let t_new = state.t + dt;
    finish_nonnegative(out, allow, t_new, "n")
}

/// One explicit Euler step of the signal equation
/// `c_t = Δc − c + n − ∇·(u c)`. For nonnegative `c`, `n` under the CFL
/// bound the update is a convex combination plus a nonnegative production
/// term, so nonnegativity propagates; it is not enforced here, which keeps
/// the stepper usable on signed test modes.
pub fn step_signal(state: &State, dt: f64) -> Result<ScalarField, SchemeError> {
    let grid = state.c.grid().clone();
    let mut flux = FluxField::zeros(&grid);
    // unit-diffusivity flux −∇c is the m = 1, eps = 0 case of the kernel
    add_porous_diffusion(&mut flux, &state.c, 1.0, 0.0);
    add_advection(&mut flux, &state.c, &state.u);

    let mut out = ScalarField::zeros(&grid);
    {
        let comps: Vec<&[f64]> = (0..grid.dim).map(|a| flux.comp(a)).collect();
        ops::fill_divergence(&grid, &comps, out.data_mut());
    }
    let cd = state.c.data();
    let nd = state.n.data();
    par::update_with(out.data_mut(), |i, div| cd[i] + dt * (-div - cd[i] + nd[i]));
    out.check_finite("c", state.t + dt)?;
    Ok(out)
}

/// Clip round-off negatives to zero, reject larger negativity or NaN.
fn finish_nonnegative(
    mut field: ScalarField,
    allow: f64,
    t: f64,
    name: &'static str,
) -> Result<DensityStep, SchemeError> {
    let scan = par::clip_negative(field.data_mut(), allow);
    if !scan.finite {
        return Err(SchemeError::NonFinite { field: name, t });
    }
    if scan.min_negative < -allow {
        return Err(SchemeError::NegativeValue { field: name, min: scan.min_negative, allow, t });
    }
    Ok(DensityStep { n: field, clipped: scan.clipped })
}
