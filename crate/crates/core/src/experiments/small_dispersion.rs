//! Comparison of the weakly dispersive flow with the explicit
//! zero-dispersion phase rotation.

use rayon::prelude::*;

use super::config::Config;
use super::report::{fit_log_log, ExperimentReport};
use crate::error::{Error, Result};
use crate::evolution::{evolve, nonlinear_phase, EvolveConfig, ModelParams};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::norms::{sobolev_norm, Homogeneity};
use crate::profile::ProfileSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct SmallDispersionConfig {
    pub profile: ProfileSpec,
    /// `nu` is ignored; each sweep point sets its own.
    pub params: ModelParams,
    pub nu_list: Vec<f64>,
    pub t_eval: f64,
    /// Sobolev index of the error norm.
    pub k: f64,
    /// Regularity of the rescaled-size measurement.
    pub s: f64,
    pub grid: Grid,
    pub dt: f64,
    /// Constant `c` of the admissible window `t ≤ c |log ν|^c`.
    pub window_c: f64,
    /// Declared ceiling for the `H^k` error.
    pub error_ceiling: f64,
    pub slope_rel_tol: f64,
    /// Multiplicative band for the rescaled `Ḣ^s` sizes.
    pub size_band: f64,
    pub keep_fields: bool,
}

impl SmallDispersionConfig {
    pub fn new(params: ModelParams, grid: Grid) -> Self {
        Self {
            profile: ProfileSpec::unit(grid.dim()),
            params,
            nu_list: vec![0.1, 0.05, 0.025],
            t_eval: 1.0,
            k: 1.0,
            s: -0.1,
            grid,
            dt: 1e-3,
            window_c: 1.0,
            error_ceiling: 0.5,
            slope_rel_tol: 0.15,
            size_band: 3.0,
            keep_fields: false,
        }
    }

    /// Keys: `d`, `sigma`, `p`, `mu`, `nu_list`, `t_eval`, `k`, `s`, `dt`,
    /// `n`, `extent`, `width`, `amplitude`, `window_c`, `error_ceiling`,
    /// `slope_rel_tol`, `size_band`.
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let d = cfg.get_or("d", 1usize)?;
        let params = ModelParams::new(
            d,
            cfg.get_or("sigma", 0.75)?,
            cfg.get_or("p", 3.0)?,
            cfg.get_or("mu", 1)?,
            1.0,
        )?;
        let mut out = Self::new(params, cfg.grid_or(d, 256, 40.0)?);
        out.profile = ProfileSpec::gaussian(d, cfg.get_or("width", 1.0)?, cfg.get_or("amplitude", 1.0)?);
        out.nu_list = cfg.list_or("nu_list", out.nu_list)?;
        out.t_eval = cfg.get_or("t_eval", out.t_eval)?;
        out.k = cfg.get_or("k", out.k)?;
        out.s = cfg.get_or("s", out.s)?;
        out.dt = cfg.get_or("dt", out.dt)?;
        out.window_c = cfg.get_or("window_c", out.window_c)?;
        out.error_ceiling = cfg.get_or("error_ceiling", out.error_ceiling)?;
        out.slope_rel_tol = cfg.get_or("slope_rel_tol", out.slope_rel_tol)?;
        out.size_band = cfg.get_or("size_band", out.size_band)?;
        cfg.finish()?;
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.nu_list.is_empty() || self.nu_list.iter().any(|nu| !(0.0..=1.0).contains(nu)) {
            return Err(Error::InvalidParams("nu_list must be non-empty with entries in [0, 1]".into()));
        }
        if self.nu_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParams("nu_list must be strictly decreasing".into()));
        }
        if !(self.t_eval > 0.0 && self.dt > 0.0) {
            return Err(Error::InvalidParams("t_eval and dt must be positive".into()));
        }
        for &nu in self.nu_list.iter().filter(|&&nu| nu > 0.0) {
            let window = self.window_c * (-nu.ln()).powf(self.window_c);
            if self.t_eval > window {
                return Err(Error::InvalidParams(format!(
                    "t_eval = {} outside the window c|log ν|^c = {window} at ν = {nu}",
                    self.t_eval
                )));
            }
        }
        Ok(())
    }
}

struct Point {
    nu: f64,
    error: f64,
    linf: f64,
    hs: f64,
    field: ComplexField,
}

/// Solves the small-dispersion equation for each `ν` and measures the
/// `H^k` distance to `φ₀ e^{itμ|φ₀|^{p-1}}` at `t_eval`, plus the sizes of
/// `φ^{(ν)}(t, ν·)` in `L^∞` and `Ḣ^s`.
pub fn run_small_dispersion(cfg: &SmallDispersionConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let p = &cfg.params;
    let d = p.d as f64;
    let phi0 = cfg.profile.sample(&cfg.grid)?;
    let ode = nonlinear_phase(&phi0, cfg.t_eval, p.mu, p.p)?;
    let ode_hs = sobolev_norm(&ode, cfg.s, 2.0, Homogeneity::Homogeneous)?;
    let phi0_linf = phi0.max_abs();

    let points = cfg
        .nu_list
        .par_iter()
        .map(|&nu| {
            let evo = EvolveConfig::new((*p).with_nu(nu), &cfg.grid, cfg.t_eval)
                .with_dt(cfg.dt)
                .with_stride(usize::MAX);
            let field = evolve(&phi0, &evo)?.last().clone();
            let error = sobolev_norm(&(&field - &ode), cfg.k, 2.0, Homogeneity::Inhomogeneous)?;
            let (linf, hs) = if nu > 0.0 {
                let stretched = ComplexField::new(cfg.grid.stretched(1.0 / nu)?, field.values().to_vec())?;
                (
                    stretched.max_abs(),
                    sobolev_norm(&stretched, cfg.s, 2.0, Homogeneity::Homogeneous)?,
                )
            } else {
                (f64::NAN, f64::NAN)
            };
            Ok(Point { nu, error, linf, hs, field })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new(
        "small-dispersion",
        &["nu", "t", "hk_error", "linf_rescaled", "hs_rescaled", "hs_band_ratio"],
    );
    report.input("d", p.d);
    report.input("sigma", p.sigma);
    report.input("p", p.p);
    report.input("mu", p.mu);
    report.input("profile", format!("{:?}", cfg.profile));
    report.input("nu_list", format!("{:?}", cfg.nu_list));
    report.input("t_eval", cfg.t_eval);
    report.input("k", cfg.k);
    report.input("s", cfg.s);
    report.input("dt", cfg.dt);
    report.input("grid_n", format!("{:?}", cfg.grid.shape()));
    report.input("grid_extent", format!("{:?}", cfg.grid.extents()));
    report.input("window_c", cfg.window_c);
    report.input("boundary_amplitude", phi0.boundary_amplitude());

    let mut fit_nu = Vec::new();
    let mut fit_err = Vec::new();
    let mut max_error: f64 = 0.0;
    let mut linf_ok = true;
    let mut band_ok = true;
    let mut worst_band: f64 = 1.0;
    for pt in &points {
        let band_ratio = pt.hs / (pt.nu.powf(cfg.s - d / 2.0) * ode_hs);
        report.row("sweep", vec![pt.nu, cfg.t_eval, pt.error, pt.linf, pt.hs, band_ratio]);
        max_error = max_error.max(pt.error);
        if pt.nu > 0.0 {
            fit_nu.push(pt.nu);
            fit_err.push(pt.error);
            let rel = pt.linf / phi0_linf;
            linf_ok &= (0.5..=2.0).contains(&rel);
            band_ok &= (1.0 / cfg.size_band..=cfg.size_band).contains(&band_ratio);
            if (band_ratio.ln()).abs() > worst_band.ln().abs() {
                worst_band = band_ratio;
            }
        } else {
            report.check("zero-dispersion distance", pt.error, "< 1e-12", pt.error < 1e-12);
        }
        if cfg.keep_fields {
            report.fields.push((format!("nu{}", pt.nu), pt.field.clone()));
        }
    }
    report.check(
        "error ceiling",
        max_error,
        format!("< {}", cfg.error_ceiling),
        max_error < cfg.error_ceiling,
    );
    if fit_nu.len() >= 3 {
        let fit = fit_log_log("H^k error vs nu", &fit_nu, &fit_err)?;
        let target = 2.0 * p.sigma;
        report.check(
            "error slope",
            fit.slope,
            format!("{target} within {}%", 100.0 * cfg.slope_rel_tol),
            (fit.slope / target - 1.0).abs() <= cfg.slope_rel_tol,
        );
        report.fits.push(fit);
    }
    if !fit_nu.is_empty() {
        let worst_linf = points
            .iter()
            .filter(|pt| pt.nu > 0.0)
            .map(|pt| pt.linf / phi0_linf)
            .fold(1.0, |acc: f64, r| if (r.ln()).abs() > acc.ln().abs() { r } else { acc });
        report.check("rescaled L^inf size", worst_linf, "in [0.5, 2] times ‖φ₀‖_∞", linf_ok);
        report.check(
            "rescaled H^s size",
            worst_band,
            format!("ν^(s-d/2)·‖φ^(0)(t)‖_Ḣ^s within a factor {}", cfg.size_band),
            band_ok,
        );
    }
    report.note(format!("‖φ^(0)(t_eval)‖_Ḣ^s = {ode_hs}"));
    Ok(report)
}
