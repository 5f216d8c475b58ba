//! Small-data scattering probe: Cauchy increments of the linear profile.

use rayon::prelude::*;

use super::config::Config;
use super::report::ExperimentReport;
use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolveConfig, ModelParams};
use crate::exponents::critical_exponents;
use crate::grid::Grid;
use crate::norms::{sobolev_norm, Homogeneity};
use crate::observables::{profile_distance, scattering_defect};
use crate::profile::ProfileSpec;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringConfig {
    /// Shape of the data; rescaled so its `H^{s_c}` norm equals each amplitude.
    pub profile: ProfileSpec,
    pub params: ModelParams,
    pub amplitude_list: Vec<f64>,
    /// Amplitudes up to this value must show a decreasing defect; larger
    /// ones are reported only.
    pub small_threshold: f64,
    /// Increasing times; windows are consecutive pairs. The last is `t_end`.
    pub checkpoints: Vec<f64>,
    /// Spacing of stored snapshots; every checkpoint must be a multiple.
    pub snapshot_interval: f64,
    pub dt: Option<f64>,
    pub grid: Grid,
    pub keep_fields: bool,
}

impl ScatteringConfig {
    pub fn new(params: ModelParams, grid: Grid) -> Self {
        Self {
            profile: ProfileSpec::unit(grid.dim()),
            params,
            amplitude_list: vec![0.0, 1e-3, 1.0, 4.0],
            small_threshold: 1e-2,
            checkpoints: vec![5.0, 10.0, 20.0],
            snapshot_interval: 1.0,
            dt: None,
            grid,
            keep_fields: false,
        }
    }

    /// Keys: `d`, `sigma`, `p`, `mu`, `amplitude_list`, `small_threshold`,
    /// `checkpoints`, `snapshot_interval`, `dt`, `n`, `extent`, `width`.
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let d = cfg.get_or("d", 1usize)?;
        let params = ModelParams::new(
            d,
            cfg.get_or("sigma", 0.75)?,
            cfg.get_or("p", 7.0)?,
            cfg.get_or("mu", 1)?,
            1.0,
        )?;
        let mut out = Self::new(params, cfg.grid_or(d, 2048, 2.0 * std::f64::consts::PI * 64.0)?);
        out.profile = ProfileSpec::gaussian(d, cfg.get_or("width", 1.0)?, 1.0);
        out.amplitude_list = cfg.list_or("amplitude_list", out.amplitude_list)?;
        out.small_threshold = cfg.get_or("small_threshold", out.small_threshold)?;
        out.checkpoints = cfg.list_or("checkpoints", out.checkpoints)?;
        out.snapshot_interval = cfg.get_or("snapshot_interval", out.snapshot_interval)?;
        out.dt = cfg.get("dt")?;
        cfg.finish()?;
        Ok(out)
    }

    fn critical_eligible(&self) -> bool {
        let p = &self.params;
        (p.d == 1 && p.p > 5.0) || (p.d >= 2 && p.p > 3.0)
    }

    fn snapshot_index(&self, t: f64) -> Result<usize> {
        let k = t / self.snapshot_interval;
        if (k - k.round()).abs() > 1e-9 * k.max(1.0) {
            return Err(Error::InvalidParams(format!(
                "checkpoint {t} is not a multiple of the snapshot interval {}",
                self.snapshot_interval
            )));
        }
        Ok(k.round() as usize)
    }
}

struct Run {
    amplitude: f64,
    windows: Vec<f64>,
    increments: Vec<f64>,
    final_field: crate::field::ComplexField,
}

/// Evolves rescaled data for each amplitude and measures the profile
/// increments `‖w(t_{i+1}) - w(t_i)‖_{H^{s_c}}` over the checkpoint windows.
pub fn run_scattering_probe(cfg: &ScatteringConfig) -> Result<ExperimentReport> {
    let p = &cfg.params;
    p.validate()?;
    if !cfg.critical_eligible() {
        return Err(Error::Regime(format!(
            "(d, p) = ({}, {}) is not eligible for the critical small-data theory",
            p.d, p.p
        )));
    }
    if p.nu != 1.0 {
        return Err(Error::InvalidParams("the probe uses nu = 1".into()));
    }
    if cfg.checkpoints.len() < 2 || cfg.checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("checkpoints must be increasing with at least two entries".into()));
    }
    if cfg.amplitude_list.iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
        return Err(Error::InvalidParams("amplitudes must be non-negative".into()));
    }
    let indices = cfg
        .checkpoints
        .iter()
        .map(|&t| cfg.snapshot_index(t))
        .collect::<Result<Vec<_>>>()?;
    let t_end = cfg.checkpoints[cfg.checkpoints.len() - 1];
    let (s_c, _) = critical_exponents(p.d, p.p, p.sigma);
    let shape = cfg.profile.sample(&cfg.grid)?;
    let shape_norm = sobolev_norm(&shape, s_c, 2.0, Homogeneity::Inhomogeneous)?;

    let dt_target = cfg
        .dt
        .unwrap_or_else(|| EvolveConfig::default_dt(&cfg.grid, p.sigma, t_end));
    let per_interval = (cfg.snapshot_interval / dt_target).ceil().max(1.0) as usize;
    let dt = cfg.snapshot_interval / per_interval as f64;

    let runs = cfg
        .amplitude_list
        .par_iter()
        .map(|&amplitude| {
            let u0 = shape.scale(Complex64::new(amplitude / shape_norm, 0.0));
            let evo = EvolveConfig::new(*p, &cfg.grid, t_end)
                .with_dt(dt)
                .with_stride(per_interval)
                .with_interaction();
            let traj = evolve(&u0, &evo)?;
            let windows = indices
                .windows(2)
                .map(|w| profile_distance(&traj, p.sigma, w[0], w[1]))
                .collect::<Result<Vec<_>>>()?;
            let increments = scattering_defect(&traj, p.sigma)?;
            Ok(Run { amplitude, windows, increments, final_field: traj.last().clone() })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new("scatter", &["amplitude", "t_start", "t_end", "defect"]);
    report.input("d", p.d);
    report.input("sigma", p.sigma);
    report.input("p", p.p);
    report.input("mu", p.mu);
    report.input("s_c", s_c);
    report.input("profile", format!("{:?}", cfg.profile));
    report.input("amplitude_list", format!("{:?}", cfg.amplitude_list));
    report.input("small_threshold", cfg.small_threshold);
    report.input("checkpoints", format!("{:?}", cfg.checkpoints));
    report.input("snapshot_interval", cfg.snapshot_interval);
    report.input("dt", dt);
    report.input("grid_n", format!("{:?}", cfg.grid.shape()));
    report.input("grid_extent", format!("{:?}", cfg.grid.extents()));
    report.input("stepping", "interaction picture");

    let mut trend = Vec::new();
    for run in &runs {
        for (w, d) in cfg.checkpoints.windows(2).zip(&run.windows) {
            report.row("window", vec![run.amplitude, w[0], w[1], *d]);
        }
        for (i, d) in run.increments.iter().enumerate() {
            let t0 = i as f64 * cfg.snapshot_interval;
            report.row("increment", vec![run.amplitude, t0, t0 + cfg.snapshot_interval, *d]);
        }
        if cfg.keep_fields {
            report.fields.push((format!("amp{}_tend", run.amplitude), run.final_field.clone()));
        }
        if run.amplitude == 0.0 {
            let max = run.windows.iter().cloned().fold(0.0, f64::max);
            report.check("zero amplitude defect", max, "0", max == 0.0);
            continue;
        }
        let n = run.windows.len();
        if n < 2 {
            continue;
        }
        let ratio = run.windows[n - 1] / run.windows[n - 2];
        trend.push((run.amplitude, ratio));
        if run.amplitude > cfg.small_threshold {
            continue;
        }
        report.check(
            &format!("defect decreasing at amplitude {}", run.amplitude),
            ratio,
            "last window / previous window < 1",
            ratio < 1.0,
        );
    }
    for (a, r) in &trend {
        report.note(format!("amplitude {a}: late/early window defect ratio {r:.6e}"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refuses_ineligible_power() {
        let params = ModelParams::new(1, 0.75, 3.0, 1, 1.0).unwrap();
        let cfg = ScatteringConfig::new(params, Grid::line(64, 40.0).unwrap());
        assert!(matches!(run_scattering_probe(&cfg), Err(Error::Regime(_))));
    }

    #[test]
    fn checkpoints_must_align_with_snapshots() {
        let params = ModelParams::new(1, 0.75, 7.0, 1, 1.0).unwrap();
        let mut cfg = ScatteringConfig::new(params, Grid::line(64, 40.0).unwrap());
        cfg.checkpoints = vec![0.5, 1.25];
        cfg.snapshot_interval = 0.5;
        assert!(run_scattering_probe(&cfg).is_err());
    }
}
