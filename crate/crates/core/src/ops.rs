//! Discrete differential operators on the MAC layout, shared by the
//! steppers, the projection, and the monitors.

use crate::field::{FluxField, ScalarField, VectorField};
use crate::grid::GridSpec;
use crate::par;

/// Discrete divergence of a face-centered vector field, at cell centers.
pub fn divergence(u: &VectorField) -> ScalarField {
    let grid = u.grid().clone();
    let mut out = ScalarField::zeros(&grid);
    let comps: Vec<&[f64]> = (0..grid.dim).map(|a| u.comp(a)).collect();
    fill_divergence(&grid, &comps, out.data_mut());
    out
}

/// ∞-norm of the discrete divergence, without materializing the field.
pub fn divergence_inf_norm(u: &VectorField) -> f64 {
    let grid = u.grid();
    let comps: Vec<&[f64]> = (0..grid.dim).map(|a| u.comp(a)).collect();
    let cshape = grid.cell_shape();
    let fshapes: Vec<_> = (0..grid.dim).map(|a| grid.face_shape(a)).collect();
    let spacing: Vec<f64> = (0..grid.dim).map(|a| grid.spacing(a)).collect();
    let periodic = grid.periodic();
    let dim = grid.dim;
    par::max_with(cshape.len, |idx| {
        let c = cshape.decode(idx);
        let mut div = 0.0;
        for a in 0..dim {
            let mut fc = c;
            fc[a] = c[a];
            let left = fshapes[a].index(fc);
            fc[a] = if periodic { (c[a] + 1) % grid.cells[a] } else { c[a] + 1 };
            let right = fshapes[a].index(fc);
            div += (comps[a][right] - comps[a][left]) / spacing[a];
        }
        div.abs()
    })
}

/// `out[i] = Σ_a (F_a(right face) − F_a(left face)) / h_a`.
pub(crate) fn fill_divergence(grid: &GridSpec, comps: &[&[f64]], out: &mut [f64]) {
    let cshape = grid.cell_shape();
    let fshapes: Vec<_> = (0..grid.dim).map(|a| grid.face_shape(a)).collect();
    let spacing: Vec<f64> = (0..grid.dim).map(|a| grid.spacing(a)).collect();
    let periodic = grid.periodic();
    let dim = grid.dim;
    par::fill_with(out, |idx| {
        let c = cshape.decode(idx);
        let mut div = 0.0;
        for a in 0..dim {
            let mut fc = c;
            let left = fshapes[a].index(fc);
            fc[a] = if periodic { (c[a] + 1) % grid.cells[a] } else { c[a] + 1 };
            let right = fshapes[a].index(fc);
            div += (comps[a][right] - comps[a][left]) / spacing[a];
        }
        div
    });
}

/// Divergence of a flux field (same stencil as for vector fields).
pub fn flux_divergence(f: &FluxField) -> ScalarField {
    let grid = f.grid().clone();
    let mut out = ScalarField::zeros(&grid);
    let comps: Vec<&[f64]> = (0..grid.dim).map(|a| f.comp(a)).collect();
    fill_divergence(&grid, &comps, out.data_mut());
    out
}

/// Max over faces of |(q_right − q_left) / h|, the discrete W^{1,∞} proxy.
/// Wall faces on a box contribute zero (homogeneous Neumann).
pub fn face_gradient_inf_norm(q: &ScalarField) -> f64 {
    let grid = q.grid();
    let data = q.data();
    let cshape = grid.cell_shape();
    let periodic = grid.periodic();
    let mut worst = 0.0f64;
    for a in 0..grid.dim {
        let fshape = grid.face_shape(a);
        let h = grid.spacing(a);
        let m = grid.cells[a];
        let axis_max = par::max_with(fshape.len, |idx| {
            let mut c = fshape.decode(idx);
            let f = c[a];
            if !periodic && (f == 0 || f == m) {
                return 0.0;
            }
            c[a] = f; // right cell shares the face coordinate
            let right = cshape.index(c);
            c[a] = if f == 0 { m - 1 } else { f - 1 };
            let left = cshape.index(c);
            ((data[right] - data[left]) / h).abs()
        });
        worst = worst.max(axis_max);
    }
    worst
}

/// `u -= ∇_h q` on faces. Wall-normal faces of a box are left untouched
/// (they stay exactly zero; the pressure satisfies discrete Neumann there).
pub(crate) fn subtract_cell_gradient(u: &mut VectorField, q: &ScalarField) {
    let grid = u.grid().clone();
    let cshape = grid.cell_shape();
    let periodic = grid.periodic();
    let qd = q.data();
    for a in 0..grid.dim {
        let fshape = grid.face_shape(a);
        let h = grid.spacing(a);
        let m = grid.cells[a];
        par::update_with(u.comp_mut(a), |idx, v| {
            let mut c = fshape.decode(idx);
            let f = c[a];
            if !periodic && (f == 0 || f == m) {
                return v;
            }
            let right = cshape.index(c);
            c[a] = if f == 0 { m - 1 } else { f - 1 };
            let left = cshape.index(c);
            v - (qd[right] - qd[left]) / h
        });
    }
}

/// Max magnitude of any first difference quotient of any velocity component.
/// On a box only interior pairs are measured; this is a monitoring proxy,
/// not a boundary-layer-resolving norm.
pub fn velocity_gradient_inf_norm(u: &VectorField) -> f64 {
    let grid = u.grid();
    let periodic = grid.periodic();
    let mut worst = 0.0f64;
    for d in 0..grid.dim {
        let comp = u.comp(d);
        let fshape = grid.face_shape(d);
        for e in 0..grid.dim {
            let h = grid.spacing(e);
            let m_e = fshape.dims[e];
            let stride = fshape.strides[e];
            let axis_max = par::max_with(fshape.len, |idx| {
                let ce = fshape.coord(idx, e);
                let next = if ce + 1 < m_e {
                    idx + stride
                } else if periodic {
                    idx + stride - m_e * stride
                } else {
                    return 0.0;
                };
                ((comp[next] - comp[idx]) / h).abs()
            });
            worst = worst.max(axis_max);
        }
    }
    worst
}
