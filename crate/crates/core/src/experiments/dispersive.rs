//! Decay of the frequency-localized linear propagator kernel.

use rayon::prelude::*;

use super::config::Config;
use super::report::{fit_log_log, ExperimentReport};
use crate::error::{Error, Result};
use crate::evolution::linear_propagate;
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::lp::littlewood_paley_project;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct DispersiveConfig {
    pub d: usize,
    pub sigma: f64,
    pub n_list: Vec<f64>,
    pub times: Vec<f64>,
    pub grid: Grid,
    /// Allowed deviation of each time slope from `-d/2`.
    pub slope_tol: f64,
    /// Allowed relative deviation of the prefactor ratio from `(N_max/N_min)^{d(1-σ)}`.
    pub ratio_tol: f64,
    /// Retain `u(t_max)` for each `N` in the report.
    pub keep_fields: bool,
}

/// `count` logarithmically spaced points in `[t_min, t_max]`.
pub fn log_spaced(t_min: f64, t_max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![t_min];
    }
    (0..count)
        .map(|i| t_min * (t_max / t_min).powf(i as f64 / (count - 1) as f64))
        .collect()
}

impl DispersiveConfig {
    pub fn new(sigma: f64, grid: Grid) -> Self {
        Self {
            d: grid.dim(),
            sigma,
            n_list: vec![1.0, 2.0, 4.0],
            times: log_spaced(5.0, 40.0, 16),
            grid,
            slope_tol: 0.1,
            ratio_tol: 0.2,
            keep_fields: false,
        }
    }

    /// Keys: `d`, `sigma`, `N_list`, `t_min`, `t_max`, `t_count`, `n`,
    /// `extent`, `slope_tol`, `ratio_tol`.
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let d = cfg.get_or("d", 1usize)?;
        let grid = cfg.grid_or(d, 1 << 14, 400.0 * std::f64::consts::PI)?;
        let mut out = Self::new(cfg.get_or("sigma", 0.75)?, grid);
        out.n_list = cfg.list_or("N_list", out.n_list)?;
        out.times = log_spaced(
            cfg.get_or("t_min", 5.0)?,
            cfg.get_or("t_max", 40.0)?,
            cfg.get_or("t_count", 16usize)?,
        );
        out.slope_tol = cfg.get_or("slope_tol", out.slope_tol)?;
        out.ratio_tol = cfg.get_or("ratio_tol", out.ratio_tol)?;
        cfg.finish()?;
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        if self.d != self.grid.dim() {
            return Err(Error::DimensionMismatch { expected: self.d, found: self.grid.dim() });
        }
        if !(self.sigma > 0.5 && self.sigma <= 1.0) {
            return Err(Error::InvalidParams(format!("sigma = {} outside (1/2, 1]", self.sigma)));
        }
        if self.n_list.is_empty() || self.times.is_empty() {
            return Err(Error::InvalidParams("empty N list or time grid".into()));
        }
        if self.times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidParams("times must be positive".into()));
        }
        let n_max = self.n_list.iter().cloned().fold(0.0, f64::max);
        let t_max = self.times.iter().cloned().fold(0.0, f64::max);
        let speed = 2.0 * self.sigma * (2.0 * n_max).powf(2.0 * self.sigma - 1.0);
        let l_min = self.grid.extents().iter().cloned().fold(f64::INFINITY, f64::min);
        if speed * t_max >= l_min / 4.0 {
            return Err(Error::WrapAround(format!(
                "max group speed {speed} times t_max {t_max} reaches L/4 = {}",
                l_min / 4.0
            )));
        }
        Ok(())
    }
}

/// Discrete delta of unit mass at the grid point nearest the origin.
fn unit_delta(grid: &Grid) -> Result<ComplexField> {
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    let idx = grid.shape().iter().fold(0, |idx, &n| idx * n + n / 2);
    values[idx] = Complex64::new(1.0 / grid.cell_volume(), 0.0);
    ComplexField::new(grid.clone(), values)
}

/// For each `N`, evolves `P_N δ` under the linear flow, fits
/// `log ‖u(t)‖_∞` against `log t`, and takes the prefactor
/// `C_N = max_t t^{d/2} ‖u(t)‖_∞` over the time grid.
pub fn run_dispersive_decay(cfg: &DispersiveConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let d = cfg.d as f64;
    let delta = unit_delta(&cfg.grid)?;

    let mut keyed: Vec<(usize, f64)> = cfg.n_list.iter().cloned().enumerate().collect();
    keyed.sort_by(|a, b| a.1.total_cmp(&b.1));
    let series = keyed
        .par_iter()
        .map(|&(_, n)| {
            let u0 = littlewood_paley_project(&delta, n)?;
            let linf = cfg
                .times
                .iter()
                .map(|&t| Ok(linear_propagate(&u0, t, cfg.sigma, 1.0)?.max_abs()))
                .collect::<Result<Vec<f64>>>()?;
            let last = match cfg.keep_fields {
                true => Some(linear_propagate(&u0, cfg.times[cfg.times.len() - 1], cfg.sigma, 1.0)?),
                false => None,
            };
            Ok((linf, last))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new("dispersive", &["sigma", "N", "t", "linf", "scaled"]);
    report.input("d", cfg.d);
    report.input("sigma", cfg.sigma);
    report.input("N_list", format!("{:?}", cfg.n_list));
    report.input("times", format!("{:?}", cfg.times));
    report.input("grid_n", format!("{:?}", cfg.grid.shape()));
    report.input("grid_extent", format!("{:?}", cfg.grid.extents()));
    report.input("initial_data", "P_N applied to a unit-mass discrete delta");

    let mut prefactors = Vec::new();
    for (&(_, n), (linf, last)) in keyed.iter().zip(&series) {
        let label = format!("N={n}");
        if let Some(u) = last {
            report.fields.push((format!("N{n}_tmax"), u.clone()));
        }
        let mut pref: f64 = 0.0;
        for (&t, &m) in cfg.times.iter().zip(linf) {
            let scaled = m * t.powf(d / 2.0);
            pref = pref.max(scaled);
            report.row(&label, vec![cfg.sigma, n, t, m, scaled]);
        }
        prefactors.push(pref);
        if cfg.times.len() >= 3 {
            let fit = fit_log_log(&format!("time slope {label}"), &cfg.times, linf)?;
            report.check(
                &format!("time slope {label}"),
                fit.slope,
                format!("{} ± {}", -d / 2.0, cfg.slope_tol),
                (fit.slope + d / 2.0).abs() <= cfg.slope_tol,
            );
            report.fits.push(fit);
        }
    }

    let ns: Vec<f64> = keyed.iter().map(|k| k.1).collect();
    for (&n, &c) in ns.iter().zip(&prefactors) {
        report.row("prefactor", vec![cfg.sigma, n, f64::NAN, f64::NAN, c]);
    }
    if ns.len() >= 3 {
        report.fits.push(fit_log_log("prefactor N-scaling", &ns, &prefactors)?);
    }
    if ns.len() >= 2 {
        let (n_lo, n_hi) = (ns[0], ns[ns.len() - 1]);
        let ratio = prefactors[prefactors.len() - 1] / prefactors[0];
        let target = (n_hi / n_lo).powf(d * (1.0 - cfg.sigma));
        report.check(
            &format!("prefactor ratio N={n_hi}/N={n_lo}"),
            ratio,
            format!("{target:.6} within {}%", 100.0 * cfg.ratio_tol),
            (ratio / target - 1.0).abs() <= cfg.ratio_tol,
        );
    }
    Ok(report)
}
