//! Multi-dimensional complex FFT over a [`Grid`] built from 1-D `rustfft` plans.
//!
//! Plans are cached by the planner behind a mutex; the lock is only held
//! while fetching a plan, so transforms themselves run concurrently.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::Grid;

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let planner = PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()));
    let mut guard = planner.lock().unwrap_or_else(|e| e.into_inner());
    guard.plan_fft(len, direction)
}

fn transform(grid: &Grid, data: &mut [Complex64], direction: FftDirection) {
    assert_eq!(data.len(), grid.len());
    let shape = grid.shape();
    let d = shape.len();
    for axis in 0..d {
        let n = shape[axis];
        let stride: usize = shape[axis + 1..].iter().product();
        let fft = plan(n, direction);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        if stride == 1 {
            for line in data.chunks_exact_mut(n) {
                fft.process_with_scratch(line, &mut scratch);
            }
            continue;
        }
        let block = n * stride;
        let mut line = vec![Complex64::default(); n];
        for outer in data.chunks_exact_mut(block) {
            for inner in 0..stride {
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = outer[inner + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, value) in line.iter().enumerate() {
                    outer[inner + j * stride] = *value;
                }
            }
        }
    }
}

/// Unnormalized forward DFT (`exp(-i k x)` kernel) in place.
pub fn forward(grid: &Grid, data: &mut [Complex64]) {
    transform(grid, data, FftDirection::Forward);
}

/// Inverse DFT in place, normalized by `1 / grid.len()`.
pub fn inverse(grid: &Grid, data: &mut [Complex64]) {
    transform(grid, data, FftDirection::Inverse);
    let scale = 1.0 / grid.len() as f64;
    for z in data.iter_mut() {
        *z *= scale;
    }
}
