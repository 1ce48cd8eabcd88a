//! Dense field containers tied to a [`GridSpec`].
//!
//! Fields are value-like: cloning hands an independent copy to another
//! thread, and no operation mutates shared state.

use crate::error::SchemeError;
use crate::grid::{GridSpec, Shape, MAX_DIM};
use crate::par;

/// Cell-centered scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &GridSpec) -> Self {
        ScalarField {
            grid: grid.clone(),
            data: vec![0.0; grid.n_cells()],
        }
    }

    pub fn constant(grid: &GridSpec, value: f64) -> Self {
        ScalarField {
            grid: grid.clone(),
            data: vec![value; grid.n_cells()],
        }
    }

    /// Sample `f` at cell centers.
    pub fn from_fn(grid: &GridSpec, f: impl Fn([f64; MAX_DIM]) -> f64 + Sync) -> Self {
        let shape = grid.cell_shape();
        let mut out = ScalarField::zeros(grid);
        par::fill_with(&mut out.data, |idx| f(grid.cell_center(shape.decode(idx))));
        out
    }

    pub fn from_vec(grid: &GridSpec, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), grid.n_cells(), "data length must match grid");
        ScalarField { grid: grid.clone(), data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn shape(&self) -> Shape {
        self.grid.cell_shape()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Sum of entries weighted by the cell measure: the discrete integral.
    pub fn integral(&self) -> f64 {
        let vol = self.grid.cell_volume();
        par::sum_with(self.data.len(), |i| self.data[i]) * vol
    }

    pub fn max(&self) -> f64 {
        par::max_with(self.data.len(), |i| self.data[i])
    }

    pub fn min(&self) -> f64 {
        -par::max_with(self.data.len(), |i| -self.data[i])
    }

    pub fn max_abs(&self) -> f64 {
        par::max_with(self.data.len(), |i| self.data[i].abs())
    }

    pub fn all_finite(&self) -> bool {
        par::all_finite(&self.data)
    }

    pub fn check_finite(&self, name: &'static str, t: f64) -> Result<(), SchemeError> {
        if self.all_finite() {
            Ok(())
        } else {
            Err(SchemeError::NonFinite { field: name, t })
        }
    }
}

/// Face-centered vector field in MAC layout: component `a` lives on the
/// faces normal to axis `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: GridSpec,
    comps: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn zeros(grid: &GridSpec) -> Self {
        let comps = (0..grid.dim).map(|a| vec![0.0; grid.face_shape(a).len]).collect();
        VectorField { grid: grid.clone(), comps }
    }

    /// Sample component functions at face centers. On a box grid the normal
    /// component at wall faces is forced to zero (no-slip).
    pub fn from_fn(grid: &GridSpec, f: impl Fn(usize, [f64; MAX_DIM]) -> f64 + Sync) -> Self {
        let mut out = VectorField::zeros(grid);
        for a in 0..grid.dim {
            let shape = grid.face_shape(a);
            let wall = if grid.periodic() { usize::MAX } else { shape.dims[a] - 1 };
            par::fill_with(&mut out.comps[a], |idx| {
                let c = shape.decode(idx);
                if !grid.periodic() && (c[a] == 0 || c[a] == wall) {
                    0.0
                } else {
                    f(a, grid.face_center(a, c))
                }
            });
        }
        out
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn comp(&self, axis: usize) -> &[f64] {
        &self.comps[axis]
    }

    pub fn comp_mut(&mut self, axis: usize) -> &mut [f64] {
        &mut self.comps[axis]
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.grid.dim)
            .map(|a| par::max_with(self.comps[a].len(), |i| self.comps[a][i].abs()))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Discrete integral of |u|^2, faces weighted by the cell measure.
    pub fn l2_squared(&self) -> f64 {
        let vol = self.grid.cell_volume();
        (0..self.grid.dim)
            .map(|a| par::sum_with(self.comps[a].len(), |i| self.comps[a][i] * self.comps[a][i]))
            .sum::<f64>()
            * vol
    }

    pub fn all_finite(&self) -> bool {
        self.comps.iter().all(|c| par::all_finite(c))
    }

    pub fn check_finite(&self, name: &'static str, t: f64) -> Result<(), SchemeError> {
        if self.all_finite() {
            Ok(())
        } else {
            Err(SchemeError::NonFinite { field: name, t })
        }
    }
}

/// Per-face flux of one conserved cell quantity, aligned with the MAC faces.
///
/// The stored value is the physical flux in the positive axis direction; on
/// box grids the wall faces carry exactly zero (no normal transport).
#[derive(Debug, Clone, PartialEq)]
pub struct FluxField {
    grid: GridSpec,
    comps: Vec<Vec<f64>>,
}

impl FluxField {
    pub fn zeros(grid: &GridSpec) -> Self {
        let comps = (0..grid.dim).map(|a| vec![0.0; grid.face_shape(a).len]).collect();
        FluxField { grid: grid.clone(), comps }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn comp(&self, axis: usize) -> &[f64] {
        &self.comps[axis]
    }

    pub fn comp_mut(&mut self, axis: usize) -> &mut [f64] {
        &mut self.comps[axis]
    }

    pub fn all_finite(&self) -> bool {
        self.comps.iter().all(|c| par::all_finite(c))
    }
}
