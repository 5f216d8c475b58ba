use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid;

/// Boundary amplitude required of every sampled profile.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// `amplitude · exp(-|x - c|² / (2 width²))`.
    Gaussian { width: f64, amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec {
    pub shape: Shape,
    pub center: Vec<f64>,
}

impl ProfileSpec {
    pub fn gaussian(d: usize, width: f64, amplitude: f64) -> Self {
        Self {
            shape: Shape::Gaussian { width, amplitude },
            center: vec![0.0; d],
        }
    }

    /// Unit-amplitude, unit-width Gaussian at the origin.
    pub fn unit(d: usize) -> Self {
        Self::gaussian(d, 1.0, 1.0)
    }

    pub fn value(&self, x: &[f64]) -> Complex64 {
        match self.shape {
            Shape::Gaussian { width, amplitude } => {
                let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
                Complex64::new(amplitude * (-r2 / (2.0 * width * width)).exp(), 0.0)
            }
        }
    }

    /// Samples the profile without checking the boundary.
    pub fn sample_unchecked(&self, grid: &Grid) -> Result<ComplexField> {
        grid.check_vector(&self.center)?;
        ComplexField::from_fn(grid, |x| self.value(x))
    }

    /// Samples the profile and enforces `|u| < BOUNDARY_TOL` on the box faces
    /// (relative to the peak amplitude).
    pub fn sample(&self, grid: &Grid) -> Result<ComplexField> {
        let u = self.sample_unchecked(grid)?;
        let peak = u.max_abs();
        let edge = u.boundary_amplitude();
        if peak > 0.0 && edge >= BOUNDARY_TOL * peak {
            return Err(Error::BoundaryAmplitude(edge));
        }
        Ok(u)
    }
}
