use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::symbol::{apply_multiplier, SymbolSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    Homogeneous,
    Inhomogeneous,
}

/// `(Σ |u|^r Δx)^{1/r}` by the rectangle rule; `r = ∞` gives `max |u|`.
pub fn lebesgue_norm(u: &ComplexField, r: f64) -> Result<f64> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidParams(format!("Lebesgue exponent r = {r} < 1")));
    }
    if r.is_infinite() {
        return Ok(u.max_abs());
    }
    let dv = u.grid().cell_volume();
    let sum: f64 = if r == 2.0 {
        u.values().iter().map(|z| z.norm_sqr()).sum()
    } else {
        u.values().iter().map(|z| z.norm().powf(r)).sum()
    };
    Ok((sum * dv).powf(1.0 / r))
}

/// `W^{s,r}` norm: Bessel (inhomogeneous) or Riesz (homogeneous) weight,
/// then the `L^r` norm. Homogeneous negative `s` projects out the mean.
pub fn sobolev_norm(u: &ComplexField, s: f64, r: f64, homogeneity: Homogeneity) -> Result<f64> {
    if s == 0.0 {
        return lebesgue_norm(u, r);
    }
    let spec = match homogeneity {
        Homogeneity::Inhomogeneous => SymbolSpec::Bessel { s },
        Homogeneity::Homogeneous => SymbolSpec::Riesz { s, project_zero_mode: true },
    };
    lebesgue_norm(&apply_multiplier(u, &spec)?, r)
}

/// `L²` norm computed from DFT coefficients.
pub fn spectral_l2_norm(u: &ComplexField) -> f64 {
    let sum: f64 = u.spectrum().iter().map(|z| z.norm_sqr()).sum();
    (sum * u.grid().cell_volume() / u.len() as f64).sqrt()
}

/// `(Σ_ξ |m(ξ)|² |û(ξ)|²)^{1/2}` with the same normalization as the `L²` norm.
pub fn weighted_l2_norm(u: &ComplexField, weight: &[f64]) -> f64 {
    let sum: f64 = u
        .spectrum()
        .iter()
        .zip(weight)
        .map(|(z, w)| w * w * z.norm_sqr())
        .sum();
    (sum * u.grid().cell_volume() / u.len() as f64).sqrt()
}
