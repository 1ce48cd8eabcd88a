//! Shared fixtures and closed-form oracles for the integration tests.

#![allow(dead_code)]

use ksflow::{
    Bc, GridSpec, MonitorConfig, Params, PoissonMethod, PoissonSolver, Potential, ScalarField,
    State, VectorField, VerdictConfig,
};

/// Self-similar source solution of the porous-medium equation
/// `n_t = Δ(n^m)` in `d` dimensions:
/// `B(r,t) = t^{-α} (C − κ r²/t^{2β})_+^{1/(m−1)}` with
/// `α = d/(d(m−1)+2)`, `β = α/d`, `κ = (m−1)β/(2m)`.
pub fn barenblatt(d: usize, m: f64, c: f64, t: f64, r: f64) -> f64 {
    let df = d as f64;
    let alpha = df / (df * (m - 1.0) + 2.0);
    let beta = alpha / df;
    let kappa = (m - 1.0) * beta / (2.0 * m);
    let inner = c - kappa * r * r / t.powf(2.0 * beta);
    if inner <= 0.0 {
        0.0
    } else {
        t.powf(-alpha) * inner.powf(1.0 / (m - 1.0))
    }
}

/// Quiescent state wrapping a density field.
pub fn state_from_density(n: ScalarField) -> State {
    let grid = n.grid().clone();
    State {
        c: ScalarField::zeros(&grid),
        u: VectorField::zeros(&grid),
        p: ScalarField::zeros(&grid),
        n,
        t: 0.0,
    }
}

/// Pure-diffusion parameter set (chemotaxis, signal, and flow all off) with
/// a tiny regularization so the flux matches `Δ n^m` to well below scheme
/// error.
pub fn pure_diffusion_params(m: f64, t_end: f64) -> Params {
    Params {
        m,
        eps: 1e-9,
        phi: Potential::Zero,
        t_end,
        chemotaxis: false,
        evolve_signal: false,
        evolve_flow: false,
        ..Params::default()
    }
}

/// Integrate a quasi-1D Barenblatt profile (m = 2) from `t0` to `t1` on an
/// `nx`-cell box grid and return the L1 error against the closed form.
pub fn barenblatt_l1_error(nx: usize, t0: f64, t1: f64) -> f64 {
    let m = 2.0;
    let c = 1.0 / 3.0;
    let grid = GridSpec::new(2, vec![8.0, 0.5], vec![nx, 4], Bc::Box).unwrap();
    let n0 = ScalarField::from_fn(&grid, |x| barenblatt(1, m, c, t0, x[0] - 4.0));
    let state = state_from_density(n0);
    let params = pure_diffusion_params(m, t1 - t0);
    let solver = PoissonSolver::new(PoissonMethod::Cg, 1e-8, 10_000);
    let monitor = MonitorConfig { p_list: vec![], record_every: 100_000 };
    let outcome =
        ksflow::simulate(state, &params, &solver, &monitor, &VerdictConfig::default()).unwrap();
    let n_end = outcome.final_state.n;
    let reference = ScalarField::from_fn(&grid, |x| barenblatt(1, m, c, t1, x[0] - 4.0));
    let vol = grid.cell_volume();
    n_end
        .data()
        .iter()
        .zip(reference.data())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        * vol
}

/// Sampled steady Taylor-Green velocity (divergence-free on the MAC grid).
pub fn taylor_green(grid: &GridSpec) -> VectorField {
    let k = 2.0 * std::f64::consts::PI / grid.extent[0];
    VectorField::from_fn(grid, move |a, x| {
        if a == 0 {
            (k * x[0]).cos() * (k * x[1]).sin()
        } else {
            -(k * x[0]).sin() * (k * x[1]).cos()
        }
    })
}

/// L2 norm of the difference between two velocity fields.
pub fn velocity_l2_error(u: &VectorField, v: &VectorField) -> f64 {
    let grid = u.grid();
    let vol = grid.cell_volume();
    let mut acc = 0.0;
    for a in 0..grid.dim {
        acc += u
            .comp(a)
            .iter()
            .zip(v.comp(a))
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>();
    }
    (acc * vol).sqrt()
}

/// Drive the time-dependent Stokes solver with the steady forcing
/// `f = 2k² u_tg + ∇P*` until `t_end` and return the L2 error vs the
/// sampled Taylor-Green field.
pub fn stokes_manufactured_l2_error(n: usize, t_end: f64) -> f64 {
    let grid = GridSpec::new(2, vec![1.0, 1.0], vec![n, n], Bc::PeriodicAll).unwrap();
    let k = 2.0 * std::f64::consts::PI;
    let u_exact = taylor_green(&grid);
    let forcing = VectorField::from_fn(&grid, move |a, x| {
        let visc = if a == 0 {
            2.0 * k * k * (k * x[0]).cos() * (k * x[1]).sin()
        } else {
            -2.0 * k * k * (k * x[0]).sin() * (k * x[1]).cos()
        };
        // manufactured pressure P* = sin(kx) cos(ky): its sampled gradient
        // is not discretely curl-free, so the projection is exercised too
        let dp = if a == 0 {
            k * (k * x[0]).cos() * (k * x[1]).cos()
        } else {
            -k * (k * x[0]).sin() * (k * x[1]).sin()
        };
        visc + dp
    });
    let solver = PoissonSolver::new(PoissonMethod::Fft, 1e-12, 100);
    let mut u = u_exact.clone();
    let h = grid.min_spacing();
    let dt = 0.45 * h * h / 4.0;
    let steps = (t_end / dt).ceil() as usize;
    for _ in 0..steps {
        let (next, _) = ksflow::step_velocity_with_forcing(&u, dt, &forcing, &solver).unwrap();
        u = next;
    }
    velocity_l2_error(&u, &u_exact)
}

/// Least-squares slope of log2(error) against log2(1/n): the empirical
/// convergence order of a refinement study.
pub fn fitted_order(cells: &[usize], errors: &[f64]) -> f64 {
    assert_eq!(cells.len(), errors.len());
    let pts: Vec<(f64, f64)> = cells
        .iter()
        .zip(errors)
        .map(|(&n, &e)| (-(n as f64).log2(), e.log2()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    num / den
}
