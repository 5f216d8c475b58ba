//! Integrating-factor classical RK4 in spectral space.
//!
//! An independent discretization of the same equation, used only to
//! validate the splitting integrator.

use num_complex::Complex64;

use super::{abs_pow, dispersion_symbol, ModelParams};
use crate::error::Result;
use crate::fft;
use crate::field::ComplexField;

/// Integrates `w' = e^{-itΛ} F[iμ|u|^{p-1}u]`, `u = F^{-1}[e^{itΛ} w]`, with
/// fixed-step RK4 and returns `u(t_end)`.
pub fn integrating_factor_rk4(
    u0: &ComplexField,
    params: &ModelParams,
    t_end: f64,
    dt: f64,
) -> Result<ComplexField> {
    params.validate()?;
    let grid = u0.grid().clone();
    let symbol = dispersion_symbol(&grid, params)?;
    let steps = (t_end / dt).round().max(1.0) as usize;
    let h = t_end / steps as f64;
    let coupling = Complex64::new(0.0, params.mu as f64);

    let rhs = |t: f64, w: &[Complex64]| -> Vec<Complex64> {
        let mut u: Vec<Complex64> = w
            .iter()
            .zip(&symbol)
            .map(|(&z, &s)| z * Complex64::from_polar(1.0, t * s))
            .collect();
        fft::inverse(&grid, &mut u);
        for z in u.iter_mut() {
            *z = coupling * abs_pow(*z, params.p) * *z;
        }
        fft::forward(&grid, &mut u);
        for (z, &s) in u.iter_mut().zip(&symbol) {
            *z *= Complex64::from_polar(1.0, -t * s);
        }
        u
    };
    let axpy = |w: &[Complex64], k: &[Complex64], a: f64| -> Vec<Complex64> {
        w.iter().zip(k).map(|(&x, &y)| x + y * a).collect()
    };

    let mut w = u0.spectrum();
    for step in 0..steps {
        let t = step as f64 * h;
        let k1 = rhs(t, &w);
        let k2 = rhs(t + 0.5 * h, &axpy(&w, &k1, 0.5 * h));
        let k3 = rhs(t + 0.5 * h, &axpy(&w, &k2, 0.5 * h));
        let k4 = rhs(t + h, &axpy(&w, &k3, h));
        for i in 0..w.len() {
            w[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }
    let spectrum = w
        .iter()
        .zip(&symbol)
        .map(|(&z, &s)| z * Complex64::from_polar(1.0, t_end * s))
        .collect();
    ComplexField::from_spectrum(&grid, spectrum)
}
