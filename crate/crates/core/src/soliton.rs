//! Traveling profiles `Q_ω` of `P_v Q + ω^{2σ} Q - |Q|^{p-1} Q = 0` by
//! Petviashvili iteration, and a check of the resulting traveling wave
//! against the time evolver.
//!
//! Under the evolver's sign convention the ansatz
//! `u = e^{it(|v|^{2σ} - ω^{2σ})} e^{-iv·x} Q(x - 2tσ|v|^{2(σ-1)}v)` solves
//! the equation with `μ = -1`, the focusing sign.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{abs_pow, evolve, EvolveConfig, ModelParams};
use crate::field::ComplexField;
use crate::norms::lebesgue_norm;
use crate::profile::ProfileSpec;
use crate::symbol::{apply_multiplier_values, evaluate_real_symbol, SymbolSpec};
use crate::transform::{modulate, spatial_shift};

#[derive(Debug, Clone, PartialEq)]
pub struct SolitonConfig {
    pub params: ModelParams,
    pub omega: f64,
    pub v: Vec<f64>,
    /// Petviashvili exponent, `p/(p-1)` by default.
    pub gamma: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl SolitonConfig {
    /// Focusing (`μ = -1`), `ν = 1`, default exponent and stopping rule.
    pub fn new(d: usize, sigma: f64, p: f64, omega: f64, v: Vec<f64>) -> Result<Self> {
        let cfg = Self {
            params: ModelParams::new(d, sigma, p, -1, 1.0)?,
            omega,
            v,
            gamma: p / (p - 1.0),
            max_iter: 200,
            tol: 1e-10,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.params.mu != -1 {
            return Err(Error::InvalidParams(
                "traveling profiles exist for the focusing sign mu = -1".into(),
            ));
        }
        if !(self.omega > 0.0) {
            return Err(Error::InvalidParams(format!("omega = {}", self.omega)));
        }
        if !(self.gamma > 1.0 && self.gamma < self.params.p) {
            return Err(Error::InvalidParams(format!("gamma = {} outside (1, p)", self.gamma)));
        }
        if self.v.len() != self.params.d {
            return Err(Error::DimensionMismatch { expected: self.params.d, found: self.v.len() });
        }
        Ok(())
    }

    /// Drift velocity `2σ|v|^{2(σ-1)} v`.
    pub fn drift(&self) -> Vec<f64> {
        let v2: f64 = self.v.iter().map(|c| c * c).sum();
        if v2 == 0.0 {
            return vec![0.0; self.v.len()];
        }
        let c = 2.0 * self.params.sigma * v2.powf(self.params.sigma - 1.0);
        self.v.iter().map(|x| c * x).collect()
    }

    /// Phase rate `|v|^{2σ} - ω^{2σ}` of the ansatz.
    pub fn phase_rate(&self) -> f64 {
        let v2: f64 = self.v.iter().map(|c| c * c).sum();
        v2.powf(self.params.sigma) - self.omega.powf(2.0 * self.params.sigma)
    }

    /// `p_v(ξ) + ω^{2σ}` on the grid lattice.
    fn operator(&self, grid: &crate::grid::Grid) -> Result<Vec<f64>> {
        let shift = self.omega.powf(2.0 * self.params.sigma);
        Ok(evaluate_real_symbol(
            &SymbolSpec::SolitonSymbol { v: self.v.clone(), sigma: self.params.sigma },
            grid,
        )?
        .into_iter()
        .map(|x| x + shift)
        .collect())
    }
}

#[derive(Debug, Clone)]
pub struct SolitonResult {
    pub q: ComplexField,
    pub residual_history: Vec<f64>,
    pub stabilization_factor_history: Vec<f64>,
    pub converged: bool,
    /// Smallest value of `p_v + ω^{2σ}` over the lattice.
    pub coercivity_min: f64,
}

fn nonlinearity(q: &ComplexField, p: f64) -> ComplexField {
    let values = q.values().iter().map(|&z| abs_pow(z, p) * z).collect();
    ComplexField::new(q.grid().clone(), values).unwrap_or_else(|_| ComplexField::zeros(q.grid()))
}

fn inner(a: &ComplexField, b: &ComplexField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x * y.conj()).re).sum::<f64>()
        * a.grid().cell_volume()
}

fn residual_with(q: &ComplexField, op: &[f64], p: f64) -> Result<f64> {
    let norm = lebesgue_norm(q, 2.0)?;
    if norm == 0.0 {
        return Ok(0.0);
    }
    let lq = apply_multiplier_values(q, &to_complex(op))?;
    let res = &lq - &nonlinearity(q, p);
    Ok(lebesgue_norm(&res, 2.0)? / norm)
}

fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&r| Complex64::new(r, 0.0)).collect()
}

/// `‖(p_v + ω^{2σ})Q - |Q|^{p-1}Q‖_{L²} / ‖Q‖_{L²}`; zero for `Q ≡ 0`.
pub fn soliton_residual(q: &ComplexField, cfg: &SolitonConfig) -> Result<f64> {
    cfg.validate()?;
    residual_with(q, &cfg.operator(q.grid())?, cfg.params.p)
}

/// Petviashvili iteration
/// `Q ← M^γ (p_v + ω^{2σ})^{-1} |Q|^{p-1}Q`,
/// `M = ⟨(p_v + ω^{2σ})Q, Q⟩ / ⟨|Q|^{p-1}Q, Q⟩`.
pub fn petviashvili_solve(cfg: &SolitonConfig, seed: &ComplexField) -> Result<SolitonResult> {
    cfg.validate()?;
    let grid = seed.grid();
    if grid.dim() != cfg.params.d {
        return Err(Error::DimensionMismatch { expected: cfg.params.d, found: grid.dim() });
    }
    let op = cfg.operator(grid)?;
    let coercivity_min = op.iter().copied().fold(f64::INFINITY, f64::min);
    if !(coercivity_min > 0.0) {
        return Err(Error::NotCoercive(coercivity_min));
    }
    let op_c = to_complex(&op);
    let inv_c: Vec<Complex64> = op.iter().map(|&x| Complex64::new(1.0 / x, 0.0)).collect();
    let p = cfg.params.p;

    let mut q = seed.clone();
    let mut residuals = Vec::new();
    let mut factors = Vec::new();
    const PLATEAU_WINDOW: usize = 40;

    for iter in 0..=cfg.max_iter {
        let nq = nonlinearity(&q, p);
        let denom = inner(&nq, &q);
        if !(denom > 0.0) || lebesgue_norm(&q, 2.0)? == 0.0 {
            return Err(Error::Stagnation { residual: f64::INFINITY, iterations: iter });
        }
        let lq = apply_multiplier_values(&q, &op_c)?;
        let m = inner(&lq, &q) / denom;
        let residual = lebesgue_norm(&(&lq - &nq), 2.0)? / lebesgue_norm(&q, 2.0)?;
        residuals.push(residual);
        factors.push(m);
        if residual < cfg.tol {
            return Ok(SolitonResult {
                q,
                residual_history: residuals,
                stabilization_factor_history: factors,
                converged: true,
                coercivity_min,
            });
        }
        if iter == cfg.max_iter {
            break;
        }
        if residuals.len() > PLATEAU_WINDOW {
            let earlier = residuals[residuals.len() - 1 - PLATEAU_WINDOW];
            if residual > 0.99 * earlier {
                return Err(Error::Stagnation { residual, iterations: iter });
            }
        }
        let next = apply_multiplier_values(&nq, &inv_c)?;
        q = next.scale(Complex64::new(m.powf(cfg.gamma), 0.0));
    }
    Ok(SolitonResult {
        q,
        residual_history: residuals,
        stabilization_factor_history: factors,
        converged: false,
        coercivity_min,
    })
}

/// Gaussian seed of width `1/ω`.
pub fn default_seed(cfg: &SolitonConfig, grid: &crate::grid::Grid) -> Result<ComplexField> {
    ProfileSpec::gaussian(cfg.params.d, 1.0 / cfg.omega, 1.0).sample_unchecked(grid)
}

/// The ansatz `e^{it(|v|^{2σ}-ω^{2σ})} e^{-iv·x} Q(x - ct)` at time `t`.
pub fn traveling_wave(q: &ComplexField, cfg: &SolitonConfig, t: f64) -> Result<ComplexField> {
    let shift: Vec<f64> = cfg.drift().iter().map(|c| c * t).collect();
    let moved = spatial_shift(q, &shift)?;
    Ok(modulate(&moved, &cfg.v)?.scale(Complex64::from_polar(1.0, cfg.phase_rate() * t)))
}

/// Evolves `e^{-iv·x} Q` to `t_end` and returns the relative `L²` mismatch
/// against the ansatz.
pub fn traveling_wave_check(result: &SolitonResult, cfg: &SolitonConfig, t_end: f64, dt: f64) -> Result<f64> {
    if !result.converged {
        return Err(Error::InvalidParams("traveling check needs a converged profile".into()));
    }
    let u0 = traveling_wave(&result.q, cfg, 0.0)?;
    let ecfg = EvolveConfig::new(cfg.params, u0.grid(), t_end)
        .with_dt(dt)
        .with_stride(usize::MAX);
    let traj = evolve(&u0, &ecfg)?;
    let exact = traveling_wave(&result.q, cfg, t_end)?;
    Ok(lebesgue_norm(&(traj.last() - &exact), 2.0)? / lebesgue_norm(&exact, 2.0)?)
}
