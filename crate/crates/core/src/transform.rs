//! Modulation and translation of fields.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use std::f64::consts::PI;

/// Multiplies `u` by `exp(-i v·x)`, translating its spectrum by `-v`.
///
/// Every component of `v` must be an integer multiple of `2π / L_j`;
/// use [`crate::grid::Grid::round_to_lattice`] first.
pub fn modulate(u: &ComplexField, v: &[f64]) -> Result<ComplexField> {
    let grid = u.grid();
    grid.check_vector(v)?;
    for (axis, (&vj, &l)) in v.iter().zip(grid.extents()).enumerate() {
        let m = vj * l / (2.0 * PI);
        if (m - m.round()).abs() > 1e-9 * m.abs().max(1.0) {
            return Err(Error::ModulationOffLattice { axis, value: vj });
        }
    }
    if v.iter().all(|&c| c == 0.0) {
        return Ok(u.clone());
    }
    let mut values = u.values().to_vec();
    grid.for_each_position(|i, x| {
        let phase: f64 = v.iter().zip(x).map(|(a, b)| a * b).sum();
        values[i] *= Complex64::from_polar(1.0, -phase);
    });
    ComplexField::new(grid.clone(), values)
}

/// Returns `u(x - a)` via the spectral phase `exp(-i ξ·a)`.
pub fn spatial_shift(u: &ComplexField, a: &[f64]) -> Result<ComplexField> {
    let grid = u.grid();
    grid.check_vector(a)?;
    if a.iter().all(|&c| c == 0.0) {
        return Ok(u.clone());
    }
    let mut spectrum = u.spectrum();
    grid.for_each_wavevector(|i, xi| {
        let phase: f64 = xi.iter().zip(a).map(|(k, s)| k * s).sum();
        spectrum[i] *= Complex64::from_polar(1.0, -phase);
    });
    ComplexField::from_spectrum(grid, spectrum)
}
