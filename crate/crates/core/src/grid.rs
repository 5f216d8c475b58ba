//! Periodic computational box and its wavenumber lattice.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default cap on the total number of grid points.
pub const DEFAULT_MAX_POINTS: usize = 1 << 24;

/// A periodic box `[-L_j/2, L_j/2)` sampled with `n_j` points per axis.
///
/// Samples are stored row-major with the last axis fastest. Wavenumbers are
/// `2π m / L_j` for `m` in `(-n_j/2, n_j/2]`; the Nyquist index is treated as
/// a positive frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: Vec<usize>,
    extent: Vec<f64>,
}

impl Grid {
    pub fn new(n: &[usize], extent: &[f64]) -> Result<Self> {
        Self::with_max_points(n, extent, DEFAULT_MAX_POINTS)
    }

    pub fn with_max_points(n: &[usize], extent: &[f64], max_points: usize) -> Result<Self> {
        if n.is_empty() || n.len() > 3 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1..=3, got {}",
                n.len()
            )));
        }
        if n.len() != extent.len() {
            return Err(Error::InvalidGrid(
                "point counts and extents differ in length".into(),
            ));
        }
        for (&nj, &lj) in n.iter().zip(extent) {
            if nj < 8 || !nj.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "point count {nj} is not a power of two >= 8"
                )));
            }
            if !(lj.is_finite() && lj > 0.0) {
                return Err(Error::InvalidGrid(format!("extent {lj} is not positive")));
            }
        }
        let total = n
            .iter()
            .try_fold(1usize, |acc, &nj| acc.checked_mul(nj))
            .filter(|&t| t <= max_points)
            .ok_or_else(|| {
                Error::InvalidGrid(format!("total point count exceeds {max_points}"))
            })?;
        debug_assert!(total > 0);
        Ok(Self {
            n: n.to_vec(),
            extent: extent.to_vec(),
        })
    }

    /// One-dimensional grid.
    pub fn line(n: usize, extent: f64) -> Result<Self> {
        Self::new(&[n], &[extent])
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.n
    }

    pub fn extents(&self) -> &[f64] {
        &self.extent
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extent[axis] / self.n[axis] as f64
    }

    /// Quadrature weight of one cell.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.extent.iter().product()
    }

    /// Sample positions along one axis.
    pub fn coords(&self, axis: usize) -> Vec<f64> {
        let h = self.spacing(axis);
        let x0 = -0.5 * self.extent[axis];
        (0..self.n[axis]).map(|j| x0 + j as f64 * h).collect()
    }

    /// Signed integer frequency index for DFT slot `i` on `axis`.
    pub fn mode_index(&self, axis: usize, i: usize) -> i64 {
        let n = self.n[axis];
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Wavenumbers along one axis in DFT order.
    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        let k0 = 2.0 * PI / self.extent[axis];
        (0..self.n[axis])
            .map(|i| k0 * self.mode_index(axis, i) as f64)
            .collect()
    }

    /// Smallest nonzero lattice wavenumber magnitude.
    pub fn min_wavenumber(&self) -> f64 {
        self.extent
            .iter()
            .map(|l| 2.0 * PI / l)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `|ξ|` present on the lattice (corner mode).
    pub fn max_wavenumber(&self) -> f64 {
        self.n
            .iter()
            .zip(&self.extent)
            .map(|(&n, &l)| (PI * n as f64 / l).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest per-axis Nyquist wavenumber.
    pub fn nyquist(&self) -> f64 {
        self.n
            .iter()
            .zip(&self.extent)
            .map(|(&n, &l)| PI * n as f64 / l)
            .fold(0.0, f64::max)
    }

    /// Calls `f(flat_index, ξ)` for every lattice mode in storage order.
    pub fn for_each_wavevector<F: FnMut(usize, &[f64])>(&self, mut f: F) {
        let ks: Vec<Vec<f64>> = (0..self.dim()).map(|a| self.wavenumbers(a)).collect();
        self.for_each_point(&ks, &mut f);
    }

    /// Calls `f(flat_index, x)` for every sample position in storage order.
    pub fn for_each_position<F: FnMut(usize, &[f64])>(&self, mut f: F) {
        let xs: Vec<Vec<f64>> = (0..self.dim()).map(|a| self.coords(a)).collect();
        self.for_each_point(&xs, &mut f);
    }

    fn for_each_point<F: FnMut(usize, &[f64])>(&self, axes: &[Vec<f64>], f: &mut F) {
        let d = self.dim();
        let mut idx = [0usize; 3];
        let mut point = [0.0f64; 3];
        for a in 0..d {
            point[a] = axes[a][0];
        }
        for flat in 0..self.len() {
            f(flat, &point[..d]);
            // odometer, last axis fastest
            let mut a = d;
            while a > 0 {
                a -= 1;
                idx[a] += 1;
                if idx[a] < self.n[a] {
                    point[a] = axes[a][idx[a]];
                    break;
                }
                idx[a] = 0;
                point[a] = axes[a][0];
            }
        }
    }

    /// Rounds `v` to the nearest vector whose components are integer
    /// multiples of `2π / L_j`.
    pub fn round_to_lattice(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_vector(v)?;
        Ok(v
            .iter()
            .zip(&self.extent)
            .map(|(&vj, &l)| {
                let k0 = 2.0 * PI / l;
                (vj / k0).round() * k0
            })
            .collect())
    }

    pub(crate) fn check_vector(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Grid with the same point counts and every extent multiplied by `factor`.
    pub fn stretched(&self, factor: f64) -> Result<Self> {
        let extent: Vec<f64> = self.extent.iter().map(|l| l * factor).collect();
        Self::new(&self.n, &extent)
    }
}
