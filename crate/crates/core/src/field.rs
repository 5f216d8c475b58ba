use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::Grid;

/// Complex samples of a field on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        let field = Self { grid, values };
        field.ensure_finite()?;
        Ok(field)
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            values: vec![Complex64::default(); grid.len()],
            grid: grid.clone(),
        }
    }

    /// Samples `f` at every grid position.
    pub fn from_fn<F: FnMut(&[f64]) -> Complex64>(grid: &Grid, mut f: F) -> Result<Self> {
        let mut values = vec![Complex64::default(); grid.len()];
        grid.for_each_position(|i, x| values[i] = f(x));
        Self::new(grid.clone(), values)
    }

    /// Builds a field from DFT coefficients in storage order.
    pub fn from_spectrum(grid: &Grid, mut spectrum: Vec<Complex64>) -> Result<Self> {
        if spectrum.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: spectrum.len(),
            });
        }
        fft::inverse(grid, &mut spectrum);
        Self::new(grid.clone(), spectrum)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Unnormalized DFT coefficients.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut s = self.values.clone();
        fft::forward(&self.grid, &mut s);
        s
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|&z| f(z)).collect())
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|u|` over samples lying on the outer face of the box.
    pub fn boundary_amplitude(&self) -> f64 {
        let shape = self.grid.shape();
        let d = shape.len();
        let mut worst = 0.0f64;
        let mut idx = [0usize; 3];
        for (flat, z) in self.values.iter().enumerate() {
            let mut rem = flat;
            for a in (0..d).rev() {
                idx[a] = rem % shape[a];
                rem /= shape[a];
            }
            if (0..d).any(|a| idx[a] == 0 || idx[a] == shape[a] - 1) {
                worst = worst.max(z.norm());
            }
        }
        worst
    }

    /// Combines two fields on the same grid sample by sample.
    pub fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(
        &self,
        other: &Self,
        f: F,
    ) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Self::new(
            self.grid.clone(),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }
}

impl Sub for &ComplexField {
    type Output = ComplexField;

    /// Panics if the grids differ.
    fn sub(self, rhs: &ComplexField) -> ComplexField {
        self.zip_with(rhs, |a, b| a - b).expect("grid mismatch in field subtraction")
    }
}

impl Add for &ComplexField {
    type Output = ComplexField;

    fn add(self, rhs: &ComplexField) -> ComplexField {
        self.zip_with(rhs, |a, b| a + b).expect("grid mismatch in field addition")
    }
}

impl Mul<f64> for &ComplexField {
    type Output = ComplexField;

    fn mul(self, rhs: f64) -> ComplexField {
        self.scale(Complex64::new(rhs, 0.0))
    }
}
