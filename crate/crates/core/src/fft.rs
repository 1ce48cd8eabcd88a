//! Line-batched N-d FFT Poisson solve on periodic grids.
//!
//! Solves `Δ_h q = rhs − mean(rhs)` exactly in Fourier space using the
//! discrete symbol of the 2N+1-point Laplacian, fixing the solution mean to
//! zero. Exact to round-off, so the projection built on it drives the
//! discrete divergence to ~1e-15 of the input scale.

use std::sync::{Arc, Mutex};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::{GridSpec, Shape};
use crate::par;

pub(crate) struct FftPoisson {
    planner: Mutex<FftPlanner<f64>>,
}

impl FftPoisson {
    pub fn new() -> Self {
        FftPoisson { planner: Mutex::new(FftPlanner::new()) }
    }

    fn plan(&self, len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
        let mut planner = self.planner.lock().expect("fft planner poisoned");
        planner.plan_fft(len, direction)
    }

    /// Returns the solution (mean zero) and the subtracted rhs mean.
    pub fn solve(&self, grid: &GridSpec, rhs: &[f64]) -> (Vec<f64>, f64) {
        let shape = grid.cell_shape();
        let n = shape.len;
        debug_assert_eq!(rhs.len(), n);

        let mut data: Vec<Complex<f64>> = vec![Complex::ZERO; n];
        par::fill_with(&mut data, |i| Complex::new(rhs[i], 0.0));

        for axis in 0..grid.dim {
            let plan = self.plan(shape.dims[axis], FftDirection::Forward);
            transform_axis(&mut data, &shape, axis, &plan);
        }

        let mean = data[0].re / n as f64;

        // per-axis tables of the Laplacian symbol -4 sin^2(pi k / m) / h^2
        let tables: Vec<Vec<f64>> = (0..grid.dim)
            .map(|a| {
                let m = shape.dims[a];
                let h = grid.spacing(a);
                (0..m)
                    .map(|k| {
                        let s = (std::f64::consts::PI * k as f64 / m as f64).sin();
                        -4.0 * s * s / (h * h)
                    })
                    .collect()
            })
            .collect();
        let inv_n = 1.0 / n as f64;
        let dim = grid.dim;
        par::update_with(&mut data, |k, v| {
            if k == 0 {
                Complex::ZERO
            } else {
                let mut lambda = 0.0;
                for a in 0..dim {
                    lambda += tables[a][shape.coord(k, a)];
                }
                v * (inv_n / lambda)
            }
        });

        for axis in 0..grid.dim {
            let plan = self.plan(shape.dims[axis], FftDirection::Inverse);
            transform_axis(&mut data, &shape, axis, &plan);
        }

        let mut q = vec![0.0; n];
        par::fill_with(&mut q, |i| data[i].re);
        (q, mean)
    }
}

/// In-place FFT along one axis: gather lines into a contiguous buffer,
/// batch-transform, scatter back.
fn transform_axis(data: &mut [Complex<f64>], shape: &Shape, axis: usize, plan: &Arc<dyn Fft<f64>>) {
    let m = shape.dims[axis];
    if m == 1 {
        return;
    }
    let s = shape.strides[axis];
    let mut buf: Vec<Complex<f64>> = vec![Complex::ZERO; shape.len];
    par::fill_with(&mut buf, |j| {
        let line = j / m;
        let t = j % m;
        let base = (line / s) * (s * m) + (line % s);
        data[base + t * s]
    });
    process_lines(&mut buf, m, plan);
    par::fill_with(data, |i| {
        let t = (i / s) % m;
        let line = (i / (s * m)) * s + i % s;
        buf[line * m + t]
    });
}

fn process_lines(buf: &mut [Complex<f64>], m: usize, plan: &Arc<dyn Fft<f64>>) {
    // group whole lines so every chunk is a multiple of the FFT length
    let group = (par::CHUNK / m).max(1) * m;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        buf.par_chunks_mut(group).for_each(|chunk| {
            let mut scratch = vec![Complex::ZERO; plan.get_inplace_scratch_len()];
            plan.process_with_scratch(chunk, &mut scratch);
        });
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut scratch = vec![Complex::ZERO; plan.get_inplace_scratch_len()];
        for chunk in buf.chunks_mut(group) {
            plan.process_with_scratch(chunk, &mut scratch);
        }
    }
}
