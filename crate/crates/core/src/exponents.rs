//! Exponent bookkeeping: critical regularities, regime classification,
//! admissible pairs, and the measured constant in `|E(ξ)| ≲ |ξ|^{2σ}`.

use std::fmt;

use crate::grid::Grid;
use crate::symbol::{evaluate_real_symbol, SymbolSpec};

const TOL: f64 = 1e-12;

/// Returns `(s_c, s_g) = (d/2 - 2σ/(p-1), (1-σ)/2)`.
pub fn critical_exponents(d: usize, p: f64, sigma: f64) -> (f64, f64) {
    (
        d as f64 / 2.0 - 2.0 * sigma / (p - 1.0),
        (1.0 - sigma) / 2.0,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SubcriticalLwp,
    CriticalLwp,
    IllposedRange,
    OutsideTheory,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::SubcriticalLwp => "SUBCRITICAL_LWP",
            Regime::CriticalLwp => "CRITICAL_LWP",
            Regime::IllposedRange => "ILLPOSED_RANGE",
            Regime::OutsideTheory => "OUTSIDE_THEORY",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub d: usize,
    pub p: f64,
    pub sigma: f64,
    pub s: f64,
    pub s_c: f64,
    pub s_g: f64,
    pub regime: Regime,
    /// Every well-posedness range whose hypotheses matched, highest priority first.
    pub hypothesis_notes: Vec<String>,
}

impl RegimeReport {
    pub const CSV_HEADER: &'static str = "d,p,sigma,s,s_c,s_g,regime,notes";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.d,
            self.p,
            self.sigma,
            self.s,
            self.s_c,
            self.s_g,
            self.regime,
            self.hypothesis_notes.join("; ")
        )
    }
}

impl fmt::Display for RegimeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "d      : {}", self.d)?;
        writeln!(f, "p      : {}", self.p)?;
        writeln!(f, "sigma  : {}", self.sigma)?;
        writeln!(f, "s      : {}", self.s)?;
        writeln!(f, "s_c    : {}", self.s_c)?;
        writeln!(f, "s_g    : {}", self.s_g)?;
        writeln!(f, "regime : {}", self.regime)?;
        if self.hypothesis_notes.is_empty() {
            writeln!(f, "notes  : none")
        } else {
            writeln!(f, "notes  : {}", self.hypothesis_notes.join("; "))
        }
    }
}

fn is_odd_integer(p: f64) -> bool {
    (p - p.round()).abs() < TOL && (p.round() as i64) % 2 != 0
}

/// Smallest integer strictly greater than `d/2`.
pub fn sobolev_index(d: usize) -> usize {
    d / 2 + 1
}

pub fn classify_regime(d: usize, p: f64, sigma: f64, s: f64) -> RegimeReport {
    let (s_c, s_g) = critical_exponents(d, p, sigma);
    let mut matches = Vec::new();

    let sub = if d == 1 && (2.0..5.0).contains(&p) && s >= s_g - TOL {
        Some("subcritical LWP: d=1, 2<=p<5, s>=s_g")
    } else if d == 1 && p >= 5.0 && s > s_c + TOL {
        Some("subcritical LWP: d=1, p>=5, s>s_c")
    } else if d >= 2 && p >= 3.0 && s > s_c + TOL {
        Some("subcritical LWP: d>=2, p>=3, s>s_c")
    } else {
        None
    };
    if let Some(note) = sub {
        matches.push((Regime::SubcriticalLwp, note.to_string()));
    }

    if (s - s_c).abs() <= TOL && ((d == 1 && p > 5.0) || (d >= 2 && p > 3.0)) {
        matches.push((
            Regime::CriticalLwp,
            format!("critical LWP: s=s_c with {}", if d == 1 { "d=1, p>5" } else { "d>=2, p>3" }),
        ));
    }

    let k = sobolev_index(d) as f64;
    if (1..=3).contains(&d)
        && sigma > d as f64 / 4.0
        && sigma < 1.0
        && s > s_c + TOL
        && s < 0.0
        && (is_odd_integer(p) || p >= k + 1.0)
    {
        let which = if is_odd_integer(p) { "p odd" } else { "p>=k+1" };
        matches.push((
            Regime::IllposedRange,
            format!("ill-posedness: d<=3, d/4<sigma<1, s in (s_c,0), {which}"),
        ));
    }

    let regime = matches.first().map_or(Regime::OutsideTheory, |m| m.0);
    RegimeReport {
        d,
        p,
        sigma,
        s,
        s_c,
        s_g,
        regime,
        hypothesis_notes: matches.into_iter().map(|m| m.1).collect(),
    }
}

/// `2/q + d/r = d/2`, `2 ≤ q, r ≤ ∞`, `(q, r, d) ≠ (2, ∞, 2)`. Infinite
/// exponents are passed as `f64::INFINITY`.
pub fn is_admissible(q: f64, r: f64, d: usize) -> bool {
    if !(q >= 2.0 && r >= 2.0) {
        return false;
    }
    if q == 2.0 && r.is_infinite() && d == 2 {
        return false;
    }
    let lhs = 2.0 / q + d as f64 / r;
    (lhs - d as f64 / 2.0).abs() <= TOL
}

/// `-d(1-σ)(1/2 - 1/r)`.
pub fn strichartz_weight_exponent(r: f64, d: usize, sigma: f64) -> f64 {
    let w = -(d as f64) * (1.0 - sigma) * (0.5 - 1.0 / r);
    // avoid -0.0 so equality checks against 0 behave
    if w == 0.0 {
        0.0
    } else {
        w
    }
}

/// Sup over nonzero lattice modes of `|E(ξ)| / |ξ|^{2σ}` and where it occurs.
pub fn verify_error_symbol_bound(
    v: &[f64],
    sigma: f64,
    grid: &Grid,
) -> crate::Result<(f64, Vec<f64>)> {
    let e = evaluate_real_symbol(&SymbolSpec::ErrorSymbol { v: v.to_vec(), sigma }, grid)?;
    let mut best = (f64::NEG_INFINITY, Vec::new());
    grid.for_each_wavevector(|i, xi| {
        if i == 0 {
            return;
        }
        let q: f64 = xi.iter().map(|c| c * c).sum();
        let ratio = e[i].abs() / q.powf(sigma);
        if ratio > best.0 {
            best = (ratio, xi.to_vec());
        }
    });
    Ok(best)
}
