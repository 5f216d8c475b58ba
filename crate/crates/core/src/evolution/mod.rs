//! Time integration by Strang splitting of the exact linear propagator and
//! the exact zero-dispersion phase rotation.
//!
//! Sign convention: `i ∂_t u + ν^{2σ}(-Δ)^σ u + μ|u|^{p-1}u = 0`, so the
//! linear flow is `û(t) = exp(i t ν^{2σ} |ξ|^{2σ}) û(0)` and the nonlinear
//! flow is `u(t) = u(0) exp(i t μ |u(0)|^{p-1})`. In this convention
//! `μ = -1` is focusing.

pub mod oracle;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::observables::{energy_with_dispersion, mass};
use crate::symbol::{apply_multiplier, evaluate_real_symbol, SymbolSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub d: usize,
    pub sigma: f64,
    pub p: f64,
    /// `+1` or `-1`.
    pub mu: i32,
    /// Dispersion coefficient; the linear term carries `ν^{2σ}`.
    pub nu: f64,
}

impl ModelParams {
    pub fn new(d: usize, sigma: f64, p: f64, mu: i32, nu: f64) -> Result<Self> {
        let params = Self { d, sigma, p, mu, nu };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(1..=3).contains(&self.d) {
            return bad(format!("d = {}", self.d));
        }
        if !(self.sigma > 0.0 && self.sigma <= 1.0) {
            return bad(format!("sigma = {} outside (0, 1]", self.sigma));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return bad(format!("p = {} must exceed 1", self.p));
        }
        if self.mu != 1 && self.mu != -1 {
            return bad(format!("mu = {} must be +1 or -1", self.mu));
        }
        if !(0.0..=1.0).contains(&self.nu) {
            return bad(format!("nu = {} outside [0, 1]", self.nu));
        }
        Ok(())
    }

    pub fn with_nu(self, nu: f64) -> Self {
        Self { nu, ..self }
    }

    pub fn with_mu(self, mu: i32) -> Self {
        Self { mu, ..self }
    }

    pub fn with_sigma(self, sigma: f64) -> Self {
        Self { sigma, ..self }
    }

    /// `ν^{2σ}`.
    pub fn dispersion(&self) -> f64 {
        self.nu.powf(2.0 * self.sigma)
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if grid.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: grid.dim() });
        }
        Ok(())
    }
}

/// `|z|^{p-1}` with `|0|^{p-1} = 0`; odd integer `p` avoids the logarithm.
#[inline]
pub(crate) fn abs_pow(z: Complex64, p: f64) -> f64 {
    let half = 0.5 * (p - 1.0);
    if half.fract() == 0.0 && half <= 16.0 {
        z.norm_sqr().powi(half as i32)
    } else {
        let r = z.norm();
        if r == 0.0 {
            0.0
        } else {
            ((p - 1.0) * r.ln()).exp()
        }
    }
}

pub fn linear_propagate(u: &ComplexField, t: f64, sigma: f64, nu: f64) -> Result<ComplexField> {
    if t == 0.0 {
        return Ok(u.clone());
    }
    apply_multiplier(u, &SymbolSpec::LinearPropagator { t, sigma, nu })
}

pub fn nonlinear_phase(u: &ComplexField, t: f64, mu: i32, p: f64) -> Result<ComplexField> {
    if p <= 1.0 {
        return Err(Error::InvalidParams(format!("p = {p} must exceed 1")));
    }
    let coeff = t * mu as f64;
    u.map(|z| z * Complex64::from_polar(1.0, coeff * abs_pow(z, p)))
}

fn apply_phase_in_place(values: &mut [Complex64], coeff: f64, p: f64) {
    for z in values.iter_mut() {
        *z *= Complex64::from_polar(1.0, coeff * abs_pow(*z, p));
    }
}

/// One step of `L(dt/2) ∘ N(dt) ∘ L(dt/2)`. Negative `dt` steps backward.
pub fn strang_step(u: &ComplexField, dt: f64, params: &ModelParams) -> Result<ComplexField> {
    params.check_grid(u.grid())?;
    let half = linear_propagate(u, 0.5 * dt, params.sigma, params.nu)?;
    let kicked = nonlinear_phase(&half, dt, params.mu, params.p)?;
    linear_propagate(&kicked, 0.5 * dt, params.sigma, params.nu)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveConfig {
    pub params: ModelParams,
    pub t_end: f64,
    pub dt: f64,
    pub snapshot_stride: usize,
    pub mass_drift_guard: f64,
    /// Also record the interaction-picture deviation `e^{-itΛ}u(t) - u(0)`
    /// accumulated from the nonlinear increments. Needed when that
    /// deviation sits below the rounding level of `u` itself.
    pub track_interaction: bool,
}

impl EvolveConfig {
    pub const DEFAULT_MASS_DRIFT_GUARD: f64 = 1e-8;

    /// Config with the default step `min(0.1 Δx^{2σ}, t_end / 100)`.
    pub fn new(params: ModelParams, grid: &Grid, t_end: f64) -> Self {
        Self {
            params,
            t_end,
            dt: Self::default_dt(grid, params.sigma, t_end),
            snapshot_stride: 1,
            mass_drift_guard: Self::DEFAULT_MASS_DRIFT_GUARD,
            track_interaction: false,
        }
    }

    pub fn default_dt(grid: &Grid, sigma: f64, t_end: f64) -> f64 {
        let dx = (0..grid.dim()).map(|a| grid.spacing(a)).fold(f64::INFINITY, f64::min);
        let rule = 0.1 * dx.powf(2.0 * sigma);
        if t_end > 0.0 {
            rule.min(t_end / 100.0)
        } else {
            rule
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn with_interaction(mut self) -> Self {
        self.track_interaction = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParams(format!("t_end = {}", self.t_end)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt = {}", self.dt)));
        }
        if self.t_end > 0.0 && self.dt > self.t_end * (1.0 + 1e-12) {
            return Err(Error::InvalidParams(format!(
                "dt = {} exceeds t_end = {}",
                self.dt, self.t_end
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidParams("snapshot stride must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of steps and the step actually taken (`t_end / steps`).
    pub fn steps(&self) -> (usize, f64) {
        if self.t_end == 0.0 {
            return (0, self.dt);
        }
        let steps = (self.t_end / self.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (steps, self.t_end / steps as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub mass: f64,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: ModelParams,
    /// Step actually used.
    pub dt: f64,
    pub snapshot_stride: usize,
    pub times: Vec<f64>,
    pub fields: Vec<ComplexField>,
    pub diagnostics: Vec<Diagnostics>,
    /// Spectra of `e^{-i t_k Λ} u(t_k) - u(0)` when tracking was requested.
    pub interaction: Option<Vec<Vec<Complex64>>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &ComplexField {
        self.fields.last().expect("trajectory has at least one snapshot")
    }

    pub fn grid(&self) -> &Grid {
        self.fields[0].grid()
    }

    /// Largest relative mass deviation from the first snapshot.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.diagnostics[0].mass;
        self.diagnostics
            .iter()
            .map(|d| (d.mass - m0).abs() / m0.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    /// Largest relative energy deviation from the first snapshot.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.diagnostics[0].energy;
        self.diagnostics
            .iter()
            .map(|d| (d.energy - e0).abs() / e0.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    /// Assembles a trajectory from stored snapshots (e.g. read back from disk).
    pub fn from_snapshots(
        params: ModelParams,
        times: Vec<f64>,
        fields: Vec<ComplexField>,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(Error::InvalidParams("times and fields differ in length".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams("times must increase strictly".into()));
        }
        let diagnostics = fields.iter().map(|u| diagnostics_of(u, &params)).collect();
        let dt = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
        Ok(Self {
            params,
            dt,
            snapshot_stride: 1,
            times,
            fields,
            diagnostics,
            interaction: None,
        })
    }
}

fn diagnostics_of(u: &ComplexField, params: &ModelParams) -> Diagnostics {
    Diagnostics {
        mass: mass(u),
        energy: energy_with_dispersion(u, params.sigma, params.nu, params.mu, params.p)
            .unwrap_or(f64::NAN),
    }
}

/// `ν^{2σ}|ξ|^{2σ}` on the lattice.
fn dispersion_symbol(grid: &Grid, params: &ModelParams) -> Result<Vec<f64>> {
    let c = params.dispersion();
    Ok(evaluate_real_symbol(&SymbolSpec::FractionalLaplacian { sigma: params.sigma }, grid)?
        .into_iter()
        .map(|x| c * x)
        .collect())
}

/// Repeated Strang steps with the adjacent half-steps of the linear flow fused.
struct Stepper {
    grid: Grid,
    mu: i32,
    p: f64,
    dt: f64,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
}

impl Stepper {
    fn new(grid: &Grid, params: ModelParams, dt: f64) -> Result<Self> {
        Ok(Self::with_symbol(grid, &dispersion_symbol(grid, &params)?, params.mu, params.p, dt))
    }

    fn with_symbol(grid: &Grid, symbol: &[f64], mu: i32, p: f64, dt: f64) -> Self {
        Self {
            grid: grid.clone(),
            mu,
            p,
            dt,
            half: symbol.iter().map(|&w| Complex64::from_polar(1.0, 0.5 * dt * w)).collect(),
            full: symbol.iter().map(|&w| Complex64::from_polar(1.0, dt * w)).collect(),
        }
    }

    fn multiply(&self, values: &mut [Complex64], factor: &[Complex64]) {
        fft::forward(&self.grid, values);
        for (z, m) in values.iter_mut().zip(factor) {
            *z *= m;
        }
        fft::inverse(&self.grid, values);
    }

    /// Advances `steps` full Strang steps in place.
    fn advance(&self, values: &mut [Complex64], steps: usize) -> Result<()> {
        if steps == 0 {
            return Ok(());
        }
        let coeff = self.dt * self.mu as f64;
        self.multiply(values, &self.half);
        for k in 0..steps {
            apply_phase_in_place(values, coeff, self.p);
            if k + 1 < steps {
                self.multiply(values, &self.full);
            }
            if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::NonFinite);
            }
        }
        self.multiply(values, &self.half);
        Ok(())
    }
}

/// Strang stepping carried out in the interaction picture `w = e^{-itΛ}u`
/// with `w = w0 + δ`, where `δ` accumulates the nonlinear increments
/// separately so it keeps full relative precision.
struct InteractionStepper {
    grid: Grid,
    params: ModelParams,
    dt: f64,
    symbol: Vec<f64>,
    base: Vec<Complex64>,
    deviation: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl InteractionStepper {
    fn new(u0: &ComplexField, params: ModelParams, dt: f64) -> Result<Self> {
        let grid = u0.grid().clone();
        Ok(Self {
            symbol: dispersion_symbol(&grid, &params)?,
            base: u0.spectrum(),
            deviation: vec![Complex64::default(); grid.len()],
            scratch: vec![Complex64::default(); grid.len()],
            grid,
            params,
            dt,
        })
    }

    fn step(&mut self, t: f64) -> Result<()> {
        let t_mid = t + 0.5 * self.dt;
        for ((s, (&b, &dv)), &w) in self
            .scratch
            .iter_mut()
            .zip(self.base.iter().zip(&self.deviation))
            .zip(&self.symbol)
        {
            *s = (b + dv) * Complex64::from_polar(1.0, t_mid * w);
        }
        fft::inverse(&self.grid, &mut self.scratch);
        let coeff = self.dt * self.params.mu as f64;
        for z in self.scratch.iter_mut() {
            let theta = coeff * abs_pow(*z, self.params.p);
            // e^{iθ} - 1 without cancellation
            let half = (0.5 * theta).sin();
            *z *= Complex64::new(-2.0 * half * half, theta.sin());
        }
        fft::forward(&self.grid, &mut self.scratch);
        for ((dv, &s), &w) in self.deviation.iter_mut().zip(&self.scratch).zip(&self.symbol) {
            *dv += s * Complex64::from_polar(1.0, -t_mid * w);
        }
        if self.deviation.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    fn field_at(&self, t: f64) -> Result<ComplexField> {
        let spectrum = self
            .base
            .iter()
            .zip(&self.deviation)
            .zip(&self.symbol)
            .map(|((&b, &dv), &w)| (b + dv) * Complex64::from_polar(1.0, t * w))
            .collect();
        ComplexField::from_spectrum(&self.grid, spectrum)
    }
}

pub fn evolve(u0: &ComplexField, cfg: &EvolveConfig) -> Result<Trajectory> {
    cfg.validate()?;
    cfg.params.check_grid(u0.grid())?;
    u0.ensure_finite()?;
    let (steps, dt) = cfg.steps();
    let params = cfg.params;

    let mut traj = Trajectory {
        params,
        dt,
        snapshot_stride: cfg.snapshot_stride,
        times: vec![0.0],
        fields: vec![u0.clone()],
        diagnostics: vec![diagnostics_of(u0, &params)],
        interaction: cfg
            .track_interaction
            .then(|| vec![vec![Complex64::default(); u0.len()]]),
    };
    let m0 = traj.diagnostics[0].mass;

    let record = |traj: &mut Trajectory, k: usize, u: ComplexField, dev: Option<&[Complex64]>| {
        let t = if k == steps { cfg.t_end } else { k as f64 * dt };
        let diag = diagnostics_of(&u, &params);
        if !(diag.mass.is_finite()) {
            return Err(Error::NonFinite);
        }
        let drift = (diag.mass - m0).abs() / m0.max(f64::MIN_POSITIVE);
        if m0 > 0.0 && drift > cfg.mass_drift_guard {
            return Err(Error::MassDriftGuard { drift, time: t });
        }
        traj.times.push(t);
        traj.fields.push(u);
        traj.diagnostics.push(diag);
        if let (Some(store), Some(dev)) = (traj.interaction.as_mut(), dev) {
            store.push(dev.to_vec());
        }
        Ok(())
    };

    let mut done = 0usize;
    if cfg.track_interaction {
        let mut stepper = InteractionStepper::new(u0, params, dt)?;
        while done < steps {
            let chunk = cfg.snapshot_stride.min(steps - done);
            for k in 0..chunk {
                stepper.step((done + k) as f64 * dt)?;
            }
            done += chunk;
            let u = stepper.field_at(if done == steps { cfg.t_end } else { done as f64 * dt })?;
            record(&mut traj, done, u, Some(&stepper.deviation))?;
        }
    } else {
        let stepper = Stepper::new(u0.grid(), params, dt)?;
        let mut values = u0.values().to_vec();
        while done < steps {
            let chunk = cfg.snapshot_stride.min(steps - done);
            stepper.advance(&mut values, chunk)?;
            done += chunk;
            let u = ComplexField::from_parts_unchecked(u0.grid().clone(), values.clone());
            record(&mut traj, done, u, None)?;
        }
    }
    Ok(traj)
}

/// Strang evolution of `i∂ₜu + P(D)u + μ|u|^{p-1}u = 0` for a real
/// symbol `P` given on the lattice of `u0`. Returns `u(t_end)`.
pub fn evolve_with_symbol(
    u0: &ComplexField,
    symbol: &[f64],
    mu: i32,
    p: f64,
    t_end: f64,
    dt: f64,
) -> Result<ComplexField> {
    if symbol.len() != u0.len() {
        return Err(Error::LengthMismatch { expected: u0.len(), found: symbol.len() });
    }
    if symbol.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFinite);
    }
    if p <= 1.0 || !(t_end >= 0.0 && dt > 0.0) {
        return Err(Error::InvalidParams(format!("p = {p}, t_end = {t_end}, dt = {dt}")));
    }
    u0.ensure_finite()?;
    let steps = (t_end / dt).ceil() as usize;
    if steps == 0 {
        return Ok(u0.clone());
    }
    let stepper = Stepper::with_symbol(u0.grid(), symbol, mu, p, t_end / steps as f64);
    let mut values = u0.values().to_vec();
    stepper.advance(&mut values, steps)?;
    Ok(ComplexField::from_parts_unchecked(u0.grid().clone(), values))
}

/// Relative energy fraction above which a rescale is refused.
pub const RESCALE_ALIASING_TOL: f64 = 1e-8;

/// `λ^{-2σ/(p-1)} u(x/λ)` for `λ = 2^j`, realized on the grid with the same
/// spacing and extent `λL` by exact trigonometric re-sampling. The matching
/// time map sends the original solution time `t` to `λ^{2σ} t`.
pub fn scaling_transform(u: &ComplexField, lambda: f64, params: &ModelParams) -> Result<ComplexField> {
    params.check_grid(u.grid())?;
    let j = lambda.log2();
    if !(lambda > 0.0) || (j - j.round()).abs() > 1e-12 {
        return Err(Error::InvalidParams(format!("lambda = {lambda} is not a power of two")));
    }
    if lambda == 1.0 {
        return Ok(u.clone());
    }
    let src = u.grid();
    let d = src.dim();
    let mut shape = Vec::with_capacity(d);
    for &n in src.shape() {
        let m = n as f64 * lambda;
        if m < 8.0 {
            return Err(Error::InvalidParams(format!(
                "rescaled grid would have {m} points per axis"
            )));
        }
        shape.push(m as usize);
    }
    let extents: Vec<f64> = src.extents().iter().map(|l| l * lambda).collect();
    let target = Grid::new(&shape, &extents)?;

    let amplitude = lambda.powf(-2.0 * params.sigma / (params.p - 1.0));
    let factor = amplitude * lambda.powi(d as i32);
    let spectrum = u.spectrum();
    let mut out = vec![Complex64::default(); target.len()];
    let total: f64 = spectrum.iter().map(|z| z.norm_sqr()).sum();
    let mut dropped = 0.0;

    let src_shape = src.shape();
    let mut idx = [0usize; 3];
    for (flat, z) in spectrum.iter().enumerate() {
        let mut rem = flat;
        for a in (0..d).rev() {
            idx[a] = rem % src_shape[a];
            rem /= src_shape[a];
        }
        let mut dest = 0usize;
        let mut fits = true;
        for a in 0..d {
            let m = src.mode_index(a, idx[a]);
            let n_t = shape[a] as i64;
            if m > n_t / 2 || m <= -n_t / 2 {
                fits = false;
                break;
            }
            let slot = if m >= 0 { m } else { m + n_t } as usize;
            dest = dest * shape[a] + slot;
        }
        if fits {
            out[dest] = z * factor;
        } else {
            dropped += z.norm_sqr();
        }
    }
    if total > 0.0 && dropped / total > RESCALE_ALIASING_TOL {
        return Err(Error::RescaleAliasing { fraction: dropped / total });
    }
    ComplexField::from_spectrum(&target, out)
}

/// Time in the original solution corresponding to time `t` of the rescaled one.
pub fn scaling_time_map(t: f64, lambda: f64, sigma: f64) -> f64 {
    t / lambda.powf(2.0 * sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{lebesgue_norm, sobolev_norm, Homogeneity};
    use std::f64::consts::PI;

    fn gaussian(grid: &Grid, amp: f64, width: f64) -> ComplexField {
        ComplexField::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            Complex64::new(amp * (-r2 / (2.0 * width * width)).exp(), 0.0)
        })
        .unwrap()
    }

    fn params() -> ModelParams {
        ModelParams::new(1, 0.75, 3.0, 1, 1.0).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1, 0.0, 3.0, 1, 1.0).is_err());
        assert!(ModelParams::new(1, 1.2, 3.0, 1, 1.0).is_err());
        assert!(ModelParams::new(1, 0.5, 1.0, 1, 1.0).is_err());
        assert!(ModelParams::new(1, 0.5, 3.0, 0, 1.0).is_err());
        assert!(ModelParams::new(1, 0.5, 3.0, -1, 1.5).is_err());
        assert!(ModelParams::new(4, 0.5, 3.0, -1, 0.5).is_err());
    }

    #[test]
    fn linear_flow_identity_isometry_group() {
        let g = Grid::line(128, 30.0).unwrap();
        let u = gaussian(&g, 1.0, 1.5);
        assert_eq!(linear_propagate(&u, 0.0, 0.75, 1.0).unwrap(), u);
        let a = linear_propagate(&u, 0.7, 0.75, 1.0).unwrap();
        let m0 = lebesgue_norm(&u, 2.0).unwrap();
        assert!((lebesgue_norm(&a, 2.0).unwrap() - m0).abs() < 1e-13 * m0);
        let ab = linear_propagate(&a, 1.1, 0.75, 1.0).unwrap();
        let direct = linear_propagate(&u, 1.8, 0.75, 1.0).unwrap();
        assert!((&ab - &direct).max_abs() < 1e-12);
    }

    #[test]
    fn nonlinear_phase_matches_pointwise_formula() {
        let g = Grid::line(64, 12.0).unwrap();
        let u = gaussian(&g, 1.3, 1.0);
        let out = nonlinear_phase(&u, 0.8, -1, 3.0).unwrap();
        for (z, w) in u.values().iter().zip(out.values()) {
            let a = z.re;
            let expected = Complex64::new(a * (-0.8 * a * a).cos(), a * (-0.8 * a * a).sin());
            assert!((w - expected).norm() <= 1e-15);
            assert!((w.norm() - z.norm()).abs() <= 1e-15);
        }
    }

    #[test]
    fn nonlinear_phase_constant_field_and_zero_convention() {
        let g = Grid::line(16, 1.0).unwrap();
        let a = Complex64::new(0.6, -0.2);
        let u = ComplexField::from_fn(&g, |_| a).unwrap();
        let out = nonlinear_phase(&u, 1.7, 1, 2.5).unwrap();
        let expected = a * Complex64::from_polar(1.0, 1.7 * a.norm().powf(1.5));
        assert!(out.values().iter().all(|w| (w - expected).norm() < 1e-15));
        let zero = ComplexField::zeros(&g);
        assert_eq!(nonlinear_phase(&zero, 1.0, 1, 1.5).unwrap(), zero);
    }

    #[test]
    fn strang_reductions() {
        let g = Grid::line(64, 20.0).unwrap();
        let u = gaussian(&g, 1.0, 1.0);
        let p0 = params().with_nu(0.0);
        let s = strang_step(&u, 0.1, &p0).unwrap();
        let n = nonlinear_phase(&u, 0.1, 1, 3.0).unwrap();
        assert!((&s - &n).max_abs() < 1e-15);
        let zero = ComplexField::zeros(&g);
        assert!(strang_step(&zero, 0.1, &params()).unwrap().max_abs() == 0.0);
        // tiny amplitude: linear flow up to O(A^3)
        let tiny = gaussian(&g, 1e-6, 1.0);
        let s = strang_step(&tiny, 0.1, &params()).unwrap();
        let l = linear_propagate(&tiny, 0.1, 0.75, 1.0).unwrap();
        assert!((&s - &l).max_abs() < 1e-18);
    }

    #[test]
    fn fused_evolve_matches_repeated_steps() {
        let g = Grid::line(128, 20.0).unwrap();
        let u = gaussian(&g, 1.0, 1.0);
        let cfg = EvolveConfig::new(params(), &g, 0.5).with_dt(0.01).with_stride(7);
        let traj = evolve(&u, &cfg).unwrap();
        let mut v = u.clone();
        for _ in 0..50 {
            v = strang_step(&v, 0.01, &params()).unwrap();
        }
        assert!((traj.last() - &v).max_abs() < 1e-12);
        // 50 steps at stride 7: 7 full chunks plus a partial one
        assert_eq!(traj.times.len(), 1 + 8);
        assert_eq!(*traj.times.last().unwrap(), 0.5);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn interaction_picture_matches_plain_stepping() {
        let g = Grid::line(128, 20.0).unwrap();
        let u = gaussian(&g, 1.0, 1.0);
        let cfg = EvolveConfig::new(params(), &g, 0.5).with_dt(0.01).with_stride(10);
        let plain = evolve(&u, &cfg).unwrap();
        let inter = evolve(&u, &cfg.clone().with_interaction()).unwrap();
        assert!((plain.last() - inter.last()).max_abs() < 1e-12);
        let dev = inter.interaction.as_ref().unwrap();
        assert_eq!(dev.len(), inter.times.len());
        // deviation equals e^{-itΛ}u(t) - u0
        let t = *inter.times.last().unwrap();
        let w = linear_propagate(inter.last(), -t, 0.75, 1.0).unwrap();
        let expected = &w - &u;
        let from_dev = ComplexField::from_spectrum(&g, dev.last().unwrap().clone()).unwrap();
        assert!((&expected - &from_dev).max_abs() < 1e-12);
    }

    #[test]
    fn evolve_rejects_bad_config_and_trips_guard() {
        let g = Grid::line(64, 20.0).unwrap();
        let u = gaussian(&g, 1.0, 1.0);
        assert!(evolve(&u, &EvolveConfig::new(params(), &g, 0.1).with_dt(0.2)).is_err());
        assert!(evolve(&u, &EvolveConfig::new(params(), &g, 0.1).with_stride(0)).is_err());
        let mut cfg = EvolveConfig::new(params(), &g, 0.1).with_dt(0.01);
        cfg.mass_drift_guard = -1.0;
        assert!(matches!(evolve(&u, &cfg), Err(Error::MassDriftGuard { .. })));
        let g2 = Grid::new(&[8, 8], &[1.0, 1.0]).unwrap();
        assert!(matches!(
            evolve(&gaussian(&g2, 1.0, 0.2), &EvolveConfig::new(params(), &g2, 0.1)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn evolve_with_zero_end_time() {
        let g = Grid::line(64, 20.0).unwrap();
        let u = gaussian(&g, 1.0, 1.0);
        let traj = evolve(&u, &EvolveConfig::new(params(), &g, 0.0)).unwrap();
        assert_eq!(traj.times, vec![0.0]);
    }

    #[test]
    fn scaling_identity_and_critical_norm() {
        let g = Grid::line(256, 40.0).unwrap();
        let u = gaussian(&g, 1.0, 1.0);
        let p = ModelParams::new(1, 0.75, 5.0, 1, 1.0).unwrap();
        assert_eq!(scaling_transform(&u, 1.0, &p).unwrap(), u);
        assert!(scaling_transform(&u, 3.0, &p).is_err());
        let sc = crate::exponents::critical_exponents(1, 5.0, 0.75).0;
        let before = sobolev_norm(&u, sc, 2.0, Homogeneity::Homogeneous).unwrap();
        for &lambda in &[2.0, 4.0, 0.5] {
            let scaled = scaling_transform(&u, lambda, &p).unwrap();
            assert_eq!(scaled.grid().extents()[0], 40.0 * lambda);
            let after = sobolev_norm(&scaled, sc, 2.0, Homogeneity::Homogeneous).unwrap();
            assert!((after / before - 1.0).abs() < 1e-10, "{lambda}: {after} vs {before}");
        }
    }

    #[test]
    fn scaling_reproduces_samples() {
        let g = Grid::line(64, 2.0 * PI * 4.0).unwrap();
        let u = gaussian(&g, 1.0, 2.0);
        let p = params();
        let scaled = scaling_transform(&u, 2.0, &p).unwrap();
        let amp = 2f64.powf(-2.0 * 0.75 / 2.0);
        for j in 0..64 {
            let expected = u.values()[j] * amp;
            assert!((scaled.values()[2 * j] - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn scaling_down_detects_aliasing() {
        let g = Grid::line(64, 8.0).unwrap();
        let narrow = gaussian(&g, 1.0, 0.15);
        assert!(matches!(
            scaling_transform(&narrow, 0.25, &params()),
            Err(Error::RescaleAliasing { .. })
        ));
    }
}
