//! Declarative Fourier multipliers and their exact application.
//!
//! Zero-mode convention: a homogeneous weight `|ξ|^s` is `1` at `ξ = 0` when
//! `s = 0`, `0` when `s > 0`, and for `s < 0` it is either projected to `0`
//! or rejected as singular.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::lp;

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolSpec {
    /// `|ξ|^{2σ}`.
    FractionalLaplacian { sigma: f64 },
    /// `(1 + |ξ|²)^{s/2}`.
    Bessel { s: f64 },
    /// `|ξ|^s`; negative powers need `project_zero_mode`.
    Riesz { s: f64, project_zero_mode: bool },
    /// `|ξ|^{-d(1-σ)(1/2-1/r)} (1 + |ξ|²)^{s/2}`, the spatial weight of the
    /// derivative-loss Strichartz norm. The homogeneous factor is projected
    /// at `ξ = 0` whenever its exponent is negative.
    StrichartzWeight { s: f64, r: f64, sigma: f64, d: usize },
    /// `ψ(ξ / N)`.
    LpCutoff { n: f64 },
    /// `exp(i t ν^{2σ} |ξ|^{2σ})`.
    LinearPropagator { t: f64, sigma: f64, nu: f64 },
    /// `E(ξ) = |ξ-v|^{2σ} - |ξ|^{2σ} - |v|^{2σ} + 2σ|v|^{2σ-2} v·ξ`.
    ErrorSymbol { v: Vec<f64>, sigma: f64 },
    /// `p_v(ξ) = |ξ-v|^{2σ} - |v|^{2σ} + 2σ|v|^{2σ-2} v·ξ`.
    SolitonSymbol { v: Vec<f64>, sigma: f64 },
    Product(Vec<SymbolSpec>),
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `|ξ|^s` with the zero-mode convention of this module.
fn homogeneous(xi_sq: f64, s: f64, project: bool) -> Result<f64> {
    if s == 0.0 {
        return Ok(1.0);
    }
    if xi_sq == 0.0 {
        return if s > 0.0 || project {
            Ok(0.0)
        } else {
            Err(Error::SingularSymbol)
        };
    }
    Ok(xi_sq.powf(0.5 * s))
}

/// Pre-computed per-kind constants so lattice sweeps avoid repeated work.
enum Prepared {
    FracLap { sigma: f64 },
    Bessel { s: f64 },
    Riesz { s: f64, project: bool },
    Strichartz { s: f64, w: f64 },
    Lp { n: f64 },
    Propagator { rate: f64, sigma: f64 },
    Error { v: Vec<f64>, sigma: f64, v_pow: f64, drift: f64, exact_zero: bool },
    Soliton { v: Vec<f64>, sigma: f64, v_pow: f64, drift: f64 },
    Product(Vec<Prepared>),
}

/// Returns `(|v|^{2σ}, 2σ|v|^{2σ-2})`; the drift coefficient is zero at `v = 0`.
fn galilean_constants(v: &[f64], sigma: f64) -> (f64, f64) {
    let v_sq = norm_sq(v);
    if v_sq == 0.0 {
        (0.0, 0.0)
    } else {
        (v_sq.powf(sigma), 2.0 * sigma * v_sq.powf(sigma - 1.0))
    }
}

impl SymbolSpec {
    fn prepare(&self, d: usize) -> Result<Prepared> {
        let check_sigma = |sigma: f64| {
            if sigma > 0.0 && sigma <= 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("sigma = {sigma} outside (0, 1]")))
            }
        };
        let check_v = |v: &[f64]| {
            if v.len() == d {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: d, found: v.len() })
            }
        };
        Ok(match self {
            SymbolSpec::FractionalLaplacian { sigma } => {
                check_sigma(*sigma)?;
                Prepared::FracLap { sigma: *sigma }
            }
            SymbolSpec::Bessel { s } => Prepared::Bessel { s: *s },
            SymbolSpec::Riesz { s, project_zero_mode } => Prepared::Riesz {
                s: *s,
                project: *project_zero_mode,
            },
            SymbolSpec::StrichartzWeight { s, r, sigma, d: dim } => {
                if *dim != d {
                    return Err(Error::DimensionMismatch { expected: d, found: *dim });
                }
                check_sigma(*sigma)?;
                Prepared::Strichartz {
                    s: *s,
                    w: crate::exponents::strichartz_weight_exponent(*r, d, *sigma),
                }
            }
            SymbolSpec::LpCutoff { n } => {
                if !(*n > 0.0 && n.is_finite()) {
                    return Err(Error::InvalidParams(format!("cutoff scale {n}")));
                }
                Prepared::Lp { n: *n }
            }
            SymbolSpec::LinearPropagator { t, sigma, nu } => {
                check_sigma(*sigma)?;
                Prepared::Propagator {
                    rate: t * nu.powf(2.0 * sigma),
                    sigma: *sigma,
                }
            }
            SymbolSpec::ErrorSymbol { v, sigma } => {
                check_sigma(*sigma)?;
                check_v(v)?;
                let (v_pow, drift) = galilean_constants(v, *sigma);
                Prepared::Error {
                    v: v.clone(),
                    sigma: *sigma,
                    v_pow,
                    drift,
                    exact_zero: *sigma == 1.0,
                }
            }
            SymbolSpec::SolitonSymbol { v, sigma } => {
                check_sigma(*sigma)?;
                check_v(v)?;
                let (v_pow, drift) = galilean_constants(v, *sigma);
                Prepared::Soliton { v: v.clone(), sigma: *sigma, v_pow, drift }
            }
            SymbolSpec::Product(parts) => Prepared::Product(
                parts.iter().map(|p| p.prepare(d)).collect::<Result<_>>()?,
            ),
        })
    }

    /// Multiplier value at a single wavevector.
    pub fn value_at(&self, xi: &[f64]) -> Result<Complex64> {
        self.prepare(xi.len())?.value(xi)
    }
}

impl Prepared {
    fn value(&self, xi: &[f64]) -> Result<Complex64> {
        let re = |x: f64| Ok(Complex64::new(x, 0.0));
        match self {
            Prepared::FracLap { sigma } => re(norm_sq(xi).powf(*sigma)),
            Prepared::Bessel { s } => re((1.0 + norm_sq(xi)).powf(0.5 * s)),
            Prepared::Riesz { s, project } => re(homogeneous(norm_sq(xi), *s, *project)?),
            Prepared::Strichartz { s, w } => {
                let q = norm_sq(xi);
                re(homogeneous(q, *w, true)? * (1.0 + q).powf(0.5 * s))
            }
            Prepared::Lp { n } => re(lp::psi(norm_sq(xi).sqrt() / n)),
            Prepared::Propagator { rate, sigma } => {
                Ok(Complex64::from_polar(1.0, rate * norm_sq(xi).powf(*sigma)))
            }
            Prepared::Error { v, sigma, v_pow, drift, exact_zero } => {
                if *exact_zero {
                    return re(0.0);
                }
                re(dist_sq(xi, v).powf(*sigma) - norm_sq(xi).powf(*sigma) - v_pow
                    + drift * dot(v, xi))
            }
            Prepared::Soliton { v, sigma, v_pow, drift } => {
                re(dist_sq(xi, v).powf(*sigma) - v_pow + drift * dot(v, xi))
            }
            Prepared::Product(parts) => parts
                .iter()
                .try_fold(Complex64::new(1.0, 0.0), |acc, p| Ok(acc * p.value(xi)?)),
        }
    }
}

/// Multiplier values at every lattice mode, in DFT storage order.
pub fn evaluate_symbol(spec: &SymbolSpec, grid: &Grid) -> Result<Vec<Complex64>> {
    let prepared = spec.prepare(grid.dim())?;
    let mut out = vec![Complex64::default(); grid.len()];
    let mut failure = None;
    grid.for_each_wavevector(|i, xi| match prepared.value(xi) {
        Ok(m) => out[i] = m,
        Err(e) => {
            failure.get_or_insert(e);
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Real parts of [`evaluate_symbol`]; for the real-valued kinds.
pub fn evaluate_real_symbol(spec: &SymbolSpec, grid: &Grid) -> Result<Vec<f64>> {
    Ok(evaluate_symbol(spec, grid)?.into_iter().map(|z| z.re).collect())
}

/// Multiplies the spectrum of `u` by precomputed multiplier values.
pub fn apply_multiplier_values(u: &ComplexField, multiplier: &[Complex64]) -> Result<ComplexField> {
    let mut spectrum = u.spectrum();
    for (z, m) in spectrum.iter_mut().zip(multiplier) {
        *z *= m;
    }
    ComplexField::from_spectrum(u.grid(), spectrum)
}

pub fn apply_multiplier(u: &ComplexField, spec: &SymbolSpec) -> Result<ComplexField> {
    let multiplier = evaluate_symbol(spec, u.grid())?;
    apply_multiplier_values(u, &multiplier)
}
