//! Config parsing for `evolve` and `soliton`, and the trajectory directory
//! layout shared by `evolve` and `norms`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fnls::evolution::{EvolveConfig, ModelParams, Trajectory};
use fnls::experiments::Config;
use fnls::profile::ProfileSpec;
use fnls::snapshot;
use fnls::soliton::SolitonConfig;
use fnls::{ComplexField, Grid};

pub const RUN_FILE: &str = "run.txt";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";

pub fn snapshot_name(index: usize) -> String {
    format!("snap_{index:06}.fnls")
}

pub struct EvolveInput {
    pub u0: ComplexField,
    pub evolve: EvolveConfig,
}

fn params_from(cfg: &Config, default_mu: i32) -> Result<ModelParams> {
    Ok(ModelParams::new(
        cfg.get_or("d", 1usize)?,
        cfg.get_or("sigma", 0.75)?,
        cfg.get_or("p", 3.0)?,
        cfg.get_or("mu", default_mu)?,
        cfg.get_or("nu", 1.0)?,
    )?)
}

fn profile_from(cfg: &Config, d: usize) -> Result<ProfileSpec> {
    let mut profile = ProfileSpec::gaussian(d, cfg.get_or("width", 1.0)?, cfg.get_or("amplitude", 1.0)?);
    profile.center = cfg.list_or("center", vec![0.0; d])?;
    Ok(profile)
}

/// Keys: `d`, `sigma`, `p`, `mu`, `nu`, `t_end`, `dt`, `stride`,
/// `mass_drift_guard`, `n`, `extent`, `width`, `amplitude`, `center`, and
/// `initial` (an FNLS1 file replacing the Gaussian; relative to the config).
pub fn evolve_input(path: &Path) -> Result<EvolveInput> {
    let cfg = Config::load(path).with_context(|| format!("reading {}", path.display()))?;
    let params = params_from(&cfg, 1)?;
    let u0 = match cfg.get::<PathBuf>("initial")? {
        Some(file) => {
            let file = path.parent().map(|dir| dir.join(&file)).unwrap_or(file);
            let u = snapshot::load(&file).with_context(|| format!("loading {}", file.display()))?;
            if u.grid().dim() != params.d {
                bail!("initial field has dimension {}, config has d = {}", u.grid().dim(), params.d);
            }
            u
        }
        None => {
            let grid = cfg.grid_or(params.d, 256, 40.0)?;
            profile_from(&cfg, params.d)?.sample(&grid)?
        }
    };
    let t_end = cfg.require("t_end")?;
    let mut evolve = EvolveConfig::new(params, u0.grid(), t_end);
    if let Some(dt) = cfg.get("dt")? {
        evolve = evolve.with_dt(dt);
    }
    evolve = evolve.with_stride(cfg.get_or("stride", 1usize)?);
    evolve.mass_drift_guard = cfg.get_or("mass_drift_guard", evolve.mass_drift_guard)?;
    cfg.finish()?;
    Ok(EvolveInput { u0, evolve })
}

pub struct SolitonInput {
    pub soliton: SolitonConfig,
    pub grid: Grid,
    pub t_end: f64,
    pub dt: f64,
}

/// Keys: `d`, `sigma`, `p`, `omega`, `v`, `gamma`, `max_iter`, `tol`, `n`,
/// `extent`, `t_end`, `dt`.
pub fn soliton_input(path: &Path) -> Result<SolitonInput> {
    let cfg = Config::load(path).with_context(|| format!("reading {}", path.display()))?;
    let d = cfg.get_or("d", 1usize)?;
    let mut soliton = SolitonConfig::new(
        d,
        cfg.get_or("sigma", 0.75)?,
        cfg.get_or("p", 3.0)?,
        cfg.get_or("omega", 1.0)?,
        cfg.list_or("v", vec![0.0; d])?,
    )?;
    soliton.gamma = cfg.get_or("gamma", soliton.gamma)?;
    soliton.max_iter = cfg.get_or("max_iter", soliton.max_iter)?;
    soliton.tol = cfg.get_or("tol", soliton.tol)?;
    soliton.validate()?;
    let grid = cfg.grid_or(d, 512, 32.0 * std::f64::consts::PI)?;
    let t_end = cfg.get_or("t_end", 1.0)?;
    let dt = cfg.get_or("dt", 1e-3)?;
    cfg.finish()?;
    Ok(SolitonInput { soliton, grid, t_end, dt })
}

/// `key = value` record of the model parameters next to the snapshots.
pub fn run_record(params: &ModelParams, dt: f64, stride: usize) -> String {
    let mut out = String::from("# written by fnls evolve\n");
    let _ = writeln!(out, "d = {}", params.d);
    let _ = writeln!(out, "sigma = {}", params.sigma);
    let _ = writeln!(out, "p = {}", params.p);
    let _ = writeln!(out, "mu = {}", params.mu);
    let _ = writeln!(out, "nu = {}", params.nu);
    let _ = writeln!(out, "dt = {dt}");
    let _ = writeln!(out, "stride = {stride}");
    out
}

/// Reads a directory written by `evolve`; `sigma` overrides the recorded one.
pub fn load_trajectory(dir: &Path, sigma: Option<f64>) -> Result<(Trajectory, usize)> {
    let run = Config::load(&dir.join(RUN_FILE)).with_context(|| format!("reading {}/{RUN_FILE}", dir.display()))?;
    let mut params = params_from(&run, 1)?;
    let _: f64 = run.require("dt")?;
    let stride = run.require::<usize>("stride")?;
    run.finish()?;
    if let Some(sigma) = sigma {
        params = params.with_sigma(sigma);
    }

    let csv = std::fs::read_to_string(dir.join(DIAGNOSTICS_FILE))
        .with_context(|| format!("reading {}/{DIAGNOSTICS_FILE}", dir.display()))?;
    let mut times = Vec::new();
    for (i, line) in csv.lines().enumerate().skip(1) {
        let t = line.split(',').next().unwrap_or("");
        times.push(t.parse::<f64>().with_context(|| format!("{DIAGNOSTICS_FILE} line {}: bad time", i + 1))?);
    }
    let fields = (0..times.len())
        .map(|k| {
            let file = dir.join(snapshot_name(k));
            snapshot::load(&file).with_context(|| format!("loading {}", file.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((Trajectory::from_snapshots(params, times, fields)?, stride))
}
