//! Rectangular MAC grids in two or three dimensions.
//!
//! Scalars live at cell centers, velocity components on the faces normal to
//! their axis. Linear storage is axis-0 fastest: `idx = x + nx*(y + ny*z)`.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Maximum supported dimension; shapes are padded to this rank.
pub const MAX_DIM: usize = 3;

/// Boundary-condition selector for the whole domain.
///
/// `Box` means homogeneous Neumann for the scalar fields and no-slip
/// Dirichlet for the velocity; `PeriodicAll` wraps every axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bc {
    PeriodicAll,
    Box,
}

/// Discretization of an axis-aligned box domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Spatial dimension, 2 or 3.
    pub dim: usize,
    /// Physical length per axis (dimensionless units).
    pub extent: Vec<f64>,
    /// Cell count per axis.
    pub cells: Vec<usize>,
    pub bc: Bc,
}

impl GridSpec {
    pub fn new(dim: usize, extent: Vec<f64>, cells: Vec<usize>, bc: Bc) -> Result<Self, ConfigError> {
        let g = GridSpec { dim, extent, cells, bc };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dim < 2 || self.dim > MAX_DIM {
            return Err(ConfigError::Grid(format!("dim must be 2 or 3, got {}", self.dim)));
        }
        if self.extent.len() != self.dim || self.cells.len() != self.dim {
            return Err(ConfigError::Grid(format!(
                "extent/cells length must equal dim {} (got {}/{})",
                self.dim,
                self.extent.len(),
                self.cells.len()
            )));
        }
        for a in 0..self.dim {
            if self.cells[a] < 4 {
                return Err(ConfigError::Grid(format!(
                    "need at least 4 cells per axis, got {} on axis {a}",
                    self.cells[a]
                )));
            }
            if !(self.extent[a] > 0.0) || !self.extent[a].is_finite() {
                return Err(ConfigError::Grid(format!(
                    "extent must be positive and finite, got {} on axis {a}",
                    self.extent[a]
                )));
            }
            let h = self.spacing(a);
            if !(h > 0.0) || !h.is_finite() {
                return Err(ConfigError::Grid(format!("degenerate spacing {h} on axis {a}")));
            }
        }
        Ok(())
    }

    pub fn periodic(&self) -> bool {
        self.bc == Bc::PeriodicAll
    }

    /// Cell spacing along `axis`; derived from the stored extent and cell
    /// count so that `spacing * cells` round-trips to the stored extent.
    #[inline]
    pub fn spacing(&self, axis: usize) -> f64 {
        self.extent[axis] / self.cells[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    pub fn n_cells(&self) -> usize {
        self.cells.iter().product()
    }

    /// Measure of one cell, `h_0 * ... * h_{dim-1}`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    pub fn total_volume(&self) -> f64 {
        self.extent.iter().product()
    }

    /// Number of faces normal to `axis` along that axis: equal to the cell
    /// count on a torus, one more on a box (both walls stored).
    pub fn n_faces(&self, axis: usize) -> usize {
        match self.bc {
            Bc::PeriodicAll => self.cells[axis],
            Bc::Box => self.cells[axis] + 1,
        }
    }

    pub fn cell_shape(&self) -> Shape {
        Shape::from_dims(&self.cells)
    }

    /// Index space of the faces normal to `axis`.
    pub fn face_shape(&self, axis: usize) -> Shape {
        let mut dims = self.cells.clone();
        dims[axis] = self.n_faces(axis);
        Shape::from_dims(&dims)
    }

    /// Physical coordinates of the center of cell `coord`.
    pub fn cell_center(&self, coord: [usize; MAX_DIM]) -> [f64; MAX_DIM] {
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = (coord[a] as f64 + 0.5) * self.spacing(a);
        }
        x
    }

    /// Physical coordinates of face `coord` normal to `axis` (the coordinate
    /// along `axis` sits on the cell edge, the others at cell centers).
    pub fn face_center(&self, axis: usize, coord: [usize; MAX_DIM]) -> [f64; MAX_DIM] {
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            let off = if a == axis { 0.0 } else { 0.5 };
            x[a] = (coord[a] as f64 + off) * self.spacing(a);
        }
        x
    }
}

/// Dense row-decomposed index space with axis 0 fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub rank: usize,
    pub dims: [usize; MAX_DIM],
    pub strides: [usize; MAX_DIM],
    pub len: usize,
}

impl Shape {
    pub fn from_dims(dims: &[usize]) -> Shape {
        assert!(dims.len() >= 2 && dims.len() <= MAX_DIM);
        let mut d = [1usize; MAX_DIM];
        d[..dims.len()].copy_from_slice(dims);
        let strides = [1, d[0], d[0] * d[1]];
        Shape {
            rank: dims.len(),
            dims: d,
            strides,
            len: d[0] * d[1] * d[2],
        }
    }

    #[inline]
    pub fn coord(&self, idx: usize, axis: usize) -> usize {
        (idx / self.strides[axis]) % self.dims[axis]
    }

    #[inline]
    pub fn decode(&self, idx: usize) -> [usize; MAX_DIM] {
        let x = idx % self.dims[0];
        let rest = idx / self.dims[0];
        let y = rest % self.dims[1];
        let z = rest / self.dims[1];
        [x, y, z]
    }

    #[inline]
    pub fn index(&self, c: [usize; MAX_DIM]) -> usize {
        c[0] + self.dims[0] * (c[1] + self.dims[1] * c[2])
    }
}
