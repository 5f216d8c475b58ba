//! Conserved quantities, Strichartz-type space-time norms and the
//! scattering defect.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{abs_pow, linear_propagate, Trajectory};
use crate::exponents::{critical_exponents, is_admissible};
use crate::field::ComplexField;
use crate::lp::{littlewood_paley_project, resolvable_scales};
use crate::norms::{lebesgue_norm, weighted_l2_norm};
use crate::symbol::{apply_multiplier, evaluate_real_symbol, SymbolSpec};

/// `∫ |u|² dx`.
pub fn mass(u: &ComplexField) -> f64 {
    u.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * u.grid().cell_volume()
}

/// `∫ ½ ||∇|^σ u|² + μ/(p+1) |u|^{p+1} dx`.
pub fn energy(u: &ComplexField, sigma: f64, mu: i32, p: f64) -> Result<f64> {
    energy_with_dispersion(u, sigma, 1.0, mu, p)
}

/// Energy of the small-dispersion equation: kinetic term weighted by `ν^{2σ}`.
pub fn energy_with_dispersion(u: &ComplexField, sigma: f64, nu: f64, mu: i32, p: f64) -> Result<f64> {
    if p <= 1.0 {
        return Err(Error::InvalidParams(format!("p = {p} must exceed 1")));
    }
    let weight = evaluate_real_symbol(&SymbolSpec::Riesz { s: sigma, project_zero_mode: true }, u.grid())?;
    let kinetic = weighted_l2_norm(u, &weight).powi(2);
    let potential: f64 = u
        .values()
        .iter()
        .map(|&z| abs_pow(z, p) * z.norm_sqr())
        .sum::<f64>()
        * u.grid().cell_volume();
    Ok(0.5 * nu.powf(2.0 * sigma) * kinetic + mu as f64 / (p + 1.0) * potential)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormVariant {
    Plain,
    Tilde,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimeNormSpec {
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub sigma: f64,
    pub variant: NormVariant,
}

/// `L^q` in time over the snapshots: composite trapezoid, `q = ∞` as a max.
fn time_norm(times: &[f64], values: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        return values.iter().copied().fold(0.0, f64::max);
    }
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].powf(q) + v[1].powf(q)))
        .sum();
    integral.powf(1.0 / q)
}

fn plain_norm(traj: &Trajectory, fields: &[ComplexField], spec: &SpacetimeNormSpec, d: usize) -> Result<f64> {
    let weight = SymbolSpec::StrichartzWeight { s: spec.s, r: spec.r, sigma: spec.sigma, d };
    let values = fields
        .par_iter()
        .map(|u| lebesgue_norm(&apply_multiplier(u, &weight)?, spec.r))
        .collect::<Result<Vec<f64>>>()?;
    Ok(time_norm(&traj.times, &values, spec.q))
}

/// `S^s_{q,r}` (plain) or `S̃^s_{q,r}` (dyadic ℓ² of plain norms) over the
/// trajectory's time span.
pub fn spacetime_norm(traj: &Trajectory, spec: &SpacetimeNormSpec) -> Result<f64> {
    let d = traj.grid().dim();
    if !is_admissible(spec.q, spec.r, d) {
        return Err(Error::Inadmissible { q: spec.q, r: spec.r, d });
    }
    match spec.variant {
        NormVariant::Plain => plain_norm(traj, &traj.fields, spec, d),
        NormVariant::Tilde => {
            let scales = resolvable_scales(traj.grid());
            let pieces = scales
                .par_iter()
                .map(|&n| {
                    let banded = traj
                        .fields
                        .iter()
                        .map(|u| littlewood_paley_project(u, n))
                        .collect::<Result<Vec<_>>>()?;
                    plain_norm(traj, &banded, spec, d)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(pieces.iter().map(|x| x * x).sum::<f64>().sqrt())
        }
    }
}

/// Profiles `w(t_i) = e^{-it_i(-Δ)^σ} u(t_i)` and the consecutive distances
/// `‖w(t_{i+1}) - w(t_i)‖_{H^{s_c}}` (inhomogeneous).
///
/// When the trajectory carries interaction-picture deviations computed with
/// the same linear flow, the distances are taken from them directly.
pub fn scattering_defect(traj: &Trajectory, sigma: f64) -> Result<Vec<f64>> {
    let grid = traj.grid();
    let params = &traj.params;
    let (s_c, _) = critical_exponents(grid.dim(), params.p, sigma);
    let weight = evaluate_real_symbol(&SymbolSpec::Bessel { s: s_c }, grid)?;
    let h_sc = |u: &ComplexField| weighted_l2_norm(u, &weight);

    if let Some(dev) = traj.interaction.as_ref() {
        if params.nu == 1.0 && params.sigma == sigma {
            return dev
                .windows(2)
                .map(|w| {
                    let diff = w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect();
                    Ok(h_sc(&ComplexField::from_spectrum(grid, diff)?))
                })
                .collect();
        }
    }
    let profiles = traj
        .fields
        .par_iter()
        .zip(&traj.times)
        .map(|(u, &t)| linear_propagate(u, -t, sigma, 1.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(profiles.windows(2).map(|w| h_sc(&(&w[1] - &w[0]))).collect())
}

/// `‖w(t_j) - w(t_i)‖_{H^{s_c}}` for two snapshot indices of `traj`, with
/// `w(t) = e^{-it(-Δ)^σ} u(t)`.
pub fn profile_distance(traj: &Trajectory, sigma: f64, i: usize, j: usize) -> Result<f64> {
    if i >= traj.len() || j >= traj.len() {
        return Err(Error::InvalidParams(format!(
            "snapshot indices ({i}, {j}) out of range for {} snapshots",
            traj.len()
        )));
    }
    let grid = traj.grid();
    let params = &traj.params;
    let (s_c, _) = critical_exponents(grid.dim(), params.p, sigma);
    let weight = evaluate_real_symbol(&SymbolSpec::Bessel { s: s_c }, grid)?;
    if let Some(dev) = traj.interaction.as_ref() {
        if params.nu == 1.0 && params.sigma == sigma {
            let diff = dev[j].iter().zip(&dev[i]).map(|(a, b)| a - b).collect();
            return Ok(weighted_l2_norm(&ComplexField::from_spectrum(grid, diff)?, &weight));
        }
    }
    let wi = linear_propagate(&traj.fields[i], -traj.times[i], sigma, 1.0)?;
    let wj = linear_propagate(&traj.fields[j], -traj.times[j], sigma, 1.0)?;
    Ok(weighted_l2_norm(&(&wj - &wi), &weight))
}
