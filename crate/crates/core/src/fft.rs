//! Multi-dimensional complex transforms over the uniform torus grid.
//!
//! Forward transforms are scaled by `1/N` so the zero-frequency coefficient is
//! the grid mean; inverse transforms are unscaled.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field::GridSpec;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

fn plan(n: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match dir {
            Direction::Forward => p.plan_fft_forward(n),
            Direction::Inverse => p.plan_fft_inverse(n),
        }
    })
}

/// Transforms one scalar component stored row-major over `grid`.
pub(crate) fn transform(grid: &GridSpec, data: &mut [Complex64], dir: Direction) {
    let n = grid.n();
    let d = grid.d();
    let total = grid.num_points();
    debug_assert_eq!(data.len(), total);
    let fft = plan(n, dir);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut lines: Vec<Complex64> = Vec::new();

    for axis in (0..d).rev() {
        let stride = n.pow((d - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        lines.resize(total, Complex64::default());
        let outer = total / (stride * n);
        let mut line = 0;
        for o in 0..outer {
            let base = o * stride * n;
            for inner in 0..stride {
                let dst = &mut lines[line * n..(line + 1) * n];
                for (t, v) in dst.iter_mut().enumerate() {
                    *v = data[base + inner + t * stride];
                }
                line += 1;
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        let mut line = 0;
        for o in 0..outer {
            let base = o * stride * n;
            for inner in 0..stride {
                let src = &lines[line * n..(line + 1) * n];
                for (t, v) in src.iter().enumerate() {
                    data[base + inner + t * stride] = *v;
                }
                line += 1;
            }
        }
    }

    if dir == Direction::Forward {
        let scale = 1.0 / total as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Forward transform of every component of a component-major real buffer.
pub(crate) fn forward_real(grid: &GridSpec, real: &[f64]) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = real.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for chunk in out.chunks_mut(grid.num_points()) {
        transform(grid, chunk, Direction::Forward);
    }
    out
}

/// Inverse transform of every component, keeping the real part.
pub(crate) fn inverse_real(grid: &GridSpec, mut spec: Vec<Complex64>) -> (Vec<f64>, f64) {
    let mut max_imag = 0.0f64;
    for chunk in spec.chunks_mut(grid.num_points()) {
        transform(grid, chunk, Direction::Inverse);
    }
    let real = spec
        .iter()
        .map(|v| {
            max_imag = max_imag.max(v.im.abs());
            v.re
        })
        .collect();
    (real, max_imag)
}
