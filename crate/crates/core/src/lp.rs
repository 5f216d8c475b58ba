//! Littlewood–Paley cutoffs `ψ(ξ/N)` on dyadic annuli.
//!
//! `ψ(ξ) = η(|ξ|) - η(2|ξ|)` where `η` is a C^∞ step equal to 1 on `[0, 1]`
//! and 0 on `[2, ∞)`, so `ψ` is supported in `1/2 ≤ |ξ| ≤ 2` and the dyadic
//! sum telescopes to 1 away from the origin.

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::symbol::{apply_multiplier, SymbolSpec};

fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step: 1 for `r ≤ 1`, 0 for `r ≥ 2`.
pub fn eta(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = bump(2.0 - r);
        a / (a + bump(r - 1.0))
    }
}

/// Annular cutoff evaluated at the radius `r = |ξ|`.
pub fn psi(r: f64) -> f64 {
    eta(r) - eta(2.0 * r)
}

/// All dyadic `N = 2^j` whose annuli meet the lattice; together they cover
/// every nonzero mode.
pub fn resolvable_scales(grid: &Grid) -> Vec<f64> {
    let lo = grid.min_wavenumber().log2().floor() as i32;
    let hi = grid.max_wavenumber().log2().ceil() as i32;
    (lo..=hi).map(|j| 2f64.powi(j)).collect()
}

fn is_dyadic(n: f64) -> bool {
    n > 0.0 && {
        let j = n.log2();
        (j - j.round()).abs() < 1e-9
    }
}

pub fn littlewood_paley_project(u: &ComplexField, n: f64) -> Result<ComplexField> {
    let scales = resolvable_scales(u.grid());
    let (lo, hi) = (scales[0], scales[scales.len() - 1]);
    if !is_dyadic(n) || n < lo * (1.0 - 1e-12) || n > hi * (1.0 + 1e-12) {
        return Err(Error::DyadicScaleUnresolved(n));
    }
    apply_multiplier(u, &SymbolSpec::LpCutoff { n })
}

/// Largest `|1 - Σ_N ψ(ξ/N)|` over nonzero lattice modes.
pub fn partition_defect(grid: &Grid) -> f64 {
    let scales = resolvable_scales(grid);
    let mut worst = 0.0f64;
    grid.for_each_wavevector(|i, xi| {
        if i == 0 {
            return;
        }
        let r = xi.iter().map(|c| c * c).sum::<f64>().sqrt();
        let total: f64 = scales.iter().map(|n| psi(r / n)).sum();
        worst = worst.max((1.0 - total).abs());
    });
    worst
}
