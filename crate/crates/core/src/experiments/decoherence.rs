//! Decoherence of two rescaled, modulated small-dispersion profiles with
//! nearby amplitudes.
//!
//! All `H^s` quantities are evaluated on the grid of the profile variable
//! `y = νx/λ`. For `g(x) = λ^{-2σ/(p-1)} φ(νx/λ)` modulated by `e^{-iv·x}`
//! and shifted, the substitution `η = νζ/λ` gives
//! `‖·‖²_{H^s} = λ^{-4σ/(p-1)} (λ/ν)^d ∫ |φ̂(ζ)|² (1 + |νζ/λ - v|²)^s dζ`.

use rayon::prelude::*;

use super::config::Config;
use super::report::ExperimentReport;
use crate::error::{Error, Result};
use crate::evolution::{evolve, evolve_with_symbol, nonlinear_phase, EvolveConfig, ModelParams};
use crate::exponents::{classify_regime, Regime};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::norms::weighted_l2_norm;
use crate::profile::ProfileSpec;
use crate::transform::spatial_shift;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceConfig {
    pub a: f64,
    pub a_prime: f64,
    pub nu_list: Vec<f64>,
    /// `λ = ν^α`.
    pub alpha: f64,
    pub s: f64,
    pub epsilon: f64,
    pub k: f64,
    pub profile: ProfileSpec,
    /// `nu` is ignored.
    pub params: ModelParams,
    /// Grid of the profile variable `y`.
    pub grid: Grid,
    pub dt: f64,
    pub t_scan_step: f64,
    pub t_scan_max: f64,
    /// Fraction of `(a + a')‖w‖_{L²}` the ODE separation must reach at `T`.
    pub separation_fraction: f64,
    pub min_ratio: f64,
    /// Re-run with the full dispersion symbol in the modulated frame.
    pub true_evolution: bool,
    pub keep_fields: bool,
}

/// Quantities derived from `ν` for one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherencePoint {
    pub nu: f64,
    pub lambda: f64,
    /// Speed after lattice rounding; the velocity points along the first axis.
    pub speed: f64,
    pub speed_unrounded: f64,
    /// Spacing of the `x`-lattice the speed was rounded to.
    pub lattice: f64,
}

impl DecoherenceConfig {
    pub fn new(params: ModelParams, grid: Grid) -> Self {
        Self {
            a: 1.0,
            a_prime: 0.9,
            nu_list: vec![0.1, 0.05, 0.025],
            alpha: 0.1,
            s: -0.1,
            epsilon: 3.0,
            k: 1.0,
            profile: ProfileSpec::unit(grid.dim()),
            params,
            grid,
            dt: 1e-3,
            t_scan_step: 1e-2,
            t_scan_max: 100.0,
            separation_fraction: 0.5,
            min_ratio: 5.0,
            true_evolution: false,
            keep_fields: false,
        }
    }

    /// Keys: `d`, `sigma`, `p`, `mu`, `a`, `a_prime`, `nu_list`, `alpha`,
    /// `s`, `epsilon`, `k`, `n`, `extent`, `width`, `amplitude`, `dt`,
    /// `t_scan_step`, `t_scan_max`, `separation_fraction`, `min_ratio`,
    /// `true_evolution`.
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let d = cfg.get_or("d", 1usize)?;
        let params = ModelParams::new(
            d,
            cfg.get_or("sigma", 0.75)?,
            cfg.get_or("p", 3.0)?,
            cfg.get_or("mu", 1)?,
            1.0,
        )?;
        let mut out = Self::new(params, cfg.grid_or(d, 1024, 40.0)?);
        out.profile = ProfileSpec::gaussian(d, cfg.get_or("width", 1.0)?, cfg.get_or("amplitude", 1.0)?);
        out.a = cfg.get_or("a", out.a)?;
        out.a_prime = cfg.get_or("a_prime", out.a_prime)?;
        out.nu_list = cfg.list_or("nu_list", out.nu_list)?;
        out.alpha = cfg.get_or("alpha", out.alpha)?;
        out.s = cfg.get_or("s", out.s)?;
        out.epsilon = cfg.get_or("epsilon", out.epsilon)?;
        out.k = cfg.get_or("k", out.k)?;
        out.dt = cfg.get_or("dt", out.dt)?;
        out.t_scan_step = cfg.get_or("t_scan_step", out.t_scan_step)?;
        out.t_scan_max = cfg.get_or("t_scan_max", out.t_scan_max)?;
        out.separation_fraction = cfg.get_or("separation_fraction", out.separation_fraction)?;
        out.min_ratio = cfg.get_or("min_ratio", out.min_ratio)?;
        out.true_evolution = cfg.bool_or("true_evolution", out.true_evolution)?;
        cfg.finish()?;
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        let p = &self.params;
        p.validate()?;
        if self.grid.dim() != p.d {
            return Err(Error::DimensionMismatch { expected: p.d, found: self.grid.dim() });
        }
        let report = classify_regime(p.d, p.p, p.sigma, self.s);
        if report.regime != Regime::IllposedRange {
            return Err(Error::Regime(format!(
                "(d, p, sigma, s) = ({}, {}, {}, {}) classifies as {}, not ILLPOSED_RANGE",
                p.d, p.p, p.sigma, self.s, report.regime
            )));
        }
        let half = 0.5..=1.0;
        if !half.contains(&self.a) || !half.contains(&self.a_prime) {
            return Err(Error::InvalidParams("a and a' must lie in [1/2, 1]".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParams(format!("alpha = {} outside (0, 1]", self.alpha)));
        }
        if self.nu_list.is_empty() || self.nu_list.iter().any(|nu| !(*nu > 0.0 && *nu < 1.0)) {
            return Err(Error::InvalidParams("nu_list entries must lie in (0, 1)".into()));
        }
        if !(self.epsilon > 0.0 && self.dt > 0.0 && self.t_scan_step > 0.0 && self.t_scan_max > 0.0) {
            return Err(Error::InvalidParams("epsilon, dt and scan parameters must be positive".into()));
        }
        Ok(())
    }

    /// `λ = ν^α` and `|v| = ν^{(d(1-α)/2 + 2ασ/(p-1))/s} ε^{1/s}`, rounded to
    /// the lattice of the implied `x`-grid (extent `λL/ν`).
    pub fn derive(&self, nu: f64) -> Result<DecoherencePoint> {
        let p = &self.params;
        let d = p.d as f64;
        let lambda = nu.powf(self.alpha);
        let exponent = (d * (1.0 - self.alpha) / 2.0 + 2.0 * self.alpha * p.sigma / (p.p - 1.0)) / self.s;
        let speed_unrounded = nu.powf(exponent) * self.epsilon.powf(1.0 / self.s);
        let lattice = 2.0 * std::f64::consts::PI * nu / (lambda * self.grid.extents()[0]);
        let speed = (speed_unrounded / lattice).round() * lattice;
        if !(speed >= 1.0) || !speed.is_finite() {
            return Err(Error::InvalidParams(format!(
                "|v| = {speed} after rounding at nu = {nu}; need |v| >= 1"
            )));
        }
        Ok(DecoherencePoint { nu, lambda, speed, speed_unrounded, lattice })
    }

    /// `H^s` weight on the `y`-lattice, including the rescaling prefactor.
    pub fn weight(&self, pt: &DecoherencePoint) -> Vec<f64> {
        let p = &self.params;
        let d = p.d as f64;
        let pref = pt.lambda.powf(-2.0 * p.sigma / (p.p - 1.0)) * (pt.lambda / pt.nu).powf(d / 2.0);
        let ratio = pt.nu / pt.lambda;
        let mut out = vec![0.0; self.grid.len()];
        self.grid.for_each_wavevector(|i, zeta| {
            let r2: f64 = zeta
                .iter()
                .enumerate()
                .map(|(j, z)| {
                    let shift = if j == 0 { pt.speed } else { 0.0 };
                    (ratio * z - shift).powi(2)
                })
                .sum();
            out[i] = pref * (1.0 + r2).powf(0.5 * self.s);
        });
        out
    }

    /// First scan time at which the two zero-dispersion profiles separate
    /// by `separation_fraction · (a + a')‖w‖_{L²}`.
    pub fn decoherence_time(&self, w: &ComplexField) -> Result<f64> {
        let p = &self.params;
        let aw = w.scale(Complex64::new(self.a, 0.0));
        let bw = w.scale(Complex64::new(self.a_prime, 0.0));
        let norm = |u: &ComplexField| crate::norms::lebesgue_norm(u, 2.0);
        let target = self.separation_fraction * (self.a + self.a_prime) * norm(w)?;
        let steps = (self.t_scan_max / self.t_scan_step).ceil() as usize;
        for i in 0..=steps {
            let t = i as f64 * self.t_scan_step;
            let sep = norm(&(&nonlinear_phase(&aw, t, p.mu, p.p)? - &nonlinear_phase(&bw, t, p.mu, p.p)?))?;
            if sep >= target {
                return Ok(t);
            }
        }
        Err(Error::InvalidParams(format!(
            "ODE separation never reaches {target} before t = {}",
            self.t_scan_max
        )))
    }
}

/// Measurements for one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceMeasurement {
    pub point: DecoherencePoint,
    pub size_a: f64,
    pub size_a_prime: f64,
    pub distance_initial: f64,
    pub distance_final: f64,
    pub correction: f64,
    pub distance_final_true: Option<f64>,
    pub approximation_error: Option<f64>,
    fields: Vec<(String, ComplexField)>,
}

fn measure(
    cfg: &DecoherenceConfig,
    w: &ComplexField,
    t_dec: f64,
    nu: f64,
) -> Result<DecoherenceMeasurement> {
    let p = &cfg.params;
    let pt = cfg.derive(nu)?;
    let weight = cfg.weight(&pt);
    let hs = |u: &ComplexField| weighted_l2_norm(u, &weight);

    let data_a = w.scale(Complex64::new(cfg.a, 0.0));
    let data_b = w.scale(Complex64::new(cfg.a_prime, 0.0));
    let small = (*p).with_nu(nu);
    let solve = |u0: &ComplexField| -> Result<ComplexField> {
        let evo = EvolveConfig::new(small, &cfg.grid, t_dec)
            .with_dt(cfg.dt.min(t_dec.max(cfg.dt)))
            .with_stride(usize::MAX);
        Ok(evolve(u0, &evo)?.last().clone())
    };
    let (phi_a, phi_b) = if t_dec > 0.0 {
        (solve(&data_a)?, solve(&data_b)?)
    } else {
        (data_a.clone(), data_b.clone())
    };

    let correction = (-nu.ln()) * (pt.lambda / nu).powf(-cfg.k) * pt.speed.powf(-cfg.s - cfg.k);

    let mut out = DecoherenceMeasurement {
        point: pt,
        size_a: hs(&data_a),
        size_a_prime: hs(&data_b),
        distance_initial: hs(&(&data_a - &data_b)),
        distance_final: hs(&(&phi_a - &phi_b)),
        correction,
        distance_final_true: None,
        approximation_error: None,
        fields: Vec::new(),
    };

    if cfg.true_evolution {
        // Modulated frame: symbol |νζ - λv|^{2σ} in the y-variable and rescaled time.
        let mut symbol = vec![0.0; cfg.grid.len()];
        cfg.grid.for_each_wavevector(|i, zeta| {
            let r2: f64 = zeta
                .iter()
                .enumerate()
                .map(|(j, z)| {
                    let shift = if j == 0 { pt.lambda * pt.speed } else { 0.0 };
                    (nu * z - shift).powi(2)
                })
                .sum();
            symbol[i] = r2.powf(p.sigma);
        });
        let true_a = evolve_with_symbol(&data_a, &symbol, p.mu, p.p, t_dec, cfg.dt)?;
        let true_b = evolve_with_symbol(&data_b, &symbol, p.mu, p.p, t_dec, cfg.dt)?;
        let lv = pt.lambda * pt.speed;
        let mut drift = vec![0.0; p.d];
        drift[0] = 2.0 * p.sigma * lv.powf(2.0 * p.sigma - 1.0) * nu * t_dec;
        let phase = Complex64::from_polar(1.0, t_dec * lv.powf(2.0 * p.sigma));
        let approx_a = spatial_shift(&phi_a, &drift)?.scale(phase);
        out.distance_final_true = Some(hs(&(&true_a - &true_b)));
        out.approximation_error = Some(hs(&(&true_a - &approx_a)));
        if cfg.keep_fields {
            out.fields.push((format!("nu{nu}_true_a"), true_a));
        }
    }
    if cfg.keep_fields {
        out.fields.push((format!("nu{nu}_phi_a_T"), phi_a));
        out.fields.push((format!("nu{nu}_phi_a_prime_T"), phi_b));
    }
    Ok(out)
}

/// Runs the decoherence pipeline over `nu_list`.
pub fn run_decoherence(cfg: &DecoherenceConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let p = &cfg.params;
    let w = cfg.profile.sample(&cfg.grid)?;
    let identical = cfg.a == cfg.a_prime;
    let t_dec = if identical { 0.0 } else { cfg.decoherence_time(&w)? };

    let mut nus = cfg.nu_list.clone();
    nus.sort_by(|a, b| b.total_cmp(a));
    let results = nus
        .par_iter()
        .map(|&nu| measure(cfg, &w, t_dec, nu))
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new(
        "decohere",
        &[
            "nu",
            "lambda",
            "speed",
            "T",
            "t_physical",
            "size_a",
            "size_a_prime",
            "dist_initial",
            "dist_final",
            "ratio",
            "correction",
            "dist_final_true",
            "approx_error",
        ],
    );
    report.input("d", p.d);
    report.input("sigma", p.sigma);
    report.input("p", p.p);
    report.input("mu", p.mu);
    report.input("s", cfg.s);
    report.input("a", cfg.a);
    report.input("a_prime", cfg.a_prime);
    report.input("alpha", cfg.alpha);
    report.input("lambda_rule", "lambda = nu^alpha");
    report.input("epsilon", cfg.epsilon);
    report.input("k", cfg.k);
    report.input("nu_list", format!("{nus:?}"));
    report.input("profile", format!("{:?}", cfg.profile));
    report.input("grid_n", format!("{:?}", cfg.grid.shape()));
    report.input("grid_extent", format!("{:?}", cfg.grid.extents()));
    report.input("dt", cfg.dt);
    report.input("T", t_dec);
    report.input("boundary_amplitude", w.boundary_amplitude());
    for r in &results {
        report.input(
            &format!("v(nu={})", r.point.nu),
            format!(
                "requested {}, rounded {} (lattice {})",
                r.point.speed_unrounded, r.point.speed, r.point.lattice
            ),
        );
    }

    let mut sizes_ok = true;
    let mut initial_ok = true;
    let gap = (cfg.a - cfg.a_prime).abs();
    for r in &results {
        let pt = &r.point;
        let ratio = r.distance_final / r.distance_initial;
        report.row(
            "sweep",
            vec![
                pt.nu,
                pt.lambda,
                pt.speed,
                t_dec,
                pt.lambda.powf(2.0 * p.sigma) * t_dec,
                r.size_a,
                r.size_a_prime,
                r.distance_initial,
                r.distance_final,
                ratio,
                r.correction,
                r.distance_final_true.unwrap_or(f64::NAN),
                r.approximation_error.unwrap_or(f64::NAN),
            ],
        );
        for size in [r.size_a, r.size_a_prime] {
            sizes_ok &= (0.2 * cfg.epsilon..=5.0 * cfg.epsilon).contains(&size);
        }
        initial_ok &= r.distance_initial <= 5.0 * cfg.epsilon * gap;
        report.fields.extend(r.fields.iter().cloned());
    }
    let worst_size = results
        .iter()
        .flat_map(|r| [r.size_a, r.size_a_prime])
        .fold(cfg.epsilon, |acc, x| {
            if (x / cfg.epsilon).ln().abs() > (acc / cfg.epsilon).ln().abs() {
                x
            } else {
                acc
            }
        });
    report.check("initial sizes", worst_size, format!("in [0.2, 5] x epsilon = {}", cfg.epsilon), sizes_ok);
    let max_initial = results.iter().map(|r| r.distance_initial).fold(0.0, f64::max);
    report.check(
        "initial distance",
        max_initial,
        format!("<= 5 epsilon |a - a'| = {}", 5.0 * cfg.epsilon * gap),
        initial_ok,
    );
    if identical {
        let max_final = results.iter().map(|r| r.distance_final).fold(0.0, f64::max);
        report.check("identical data distances", max_final.max(max_initial), "0 to 1e-12", max_final.max(max_initial) <= 1e-12);
    } else if let Some(last) = results.last() {
        let ratio = last.distance_final / last.distance_initial;
        report.check(
            &format!("inflation ratio at nu={}", last.point.nu),
            ratio,
            format!(">= {}", cfg.min_ratio),
            ratio >= cfg.min_ratio,
        );
    }
    let corrections: Vec<f64> = results.iter().map(|r| r.correction).collect();
    if corrections.len() >= 2 {
        report.check(
            "correction term decreasing as nu decreases",
            corrections[corrections.len() - 1],
            "monotone",
            corrections.windows(2).all(|w| w[1] < w[0]),
        );
    }
    report.note(format!(
        "T = first scan time with ODE separation >= {} (a + a') ‖w‖_L2",
        cfg.separation_fraction
    ));
    report.note("correction term |log nu| (lambda/nu)^(-k) |v|^(-s-k) with unit constant");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{sobolev_norm, Homogeneity};
    use crate::transform::modulate;

    fn base() -> DecoherenceConfig {
        let params = ModelParams::new(1, 0.75, 3.0, 1, 1.0).unwrap();
        let mut cfg = DecoherenceConfig::new(params, Grid::line(256, 40.0).unwrap());
        cfg.dt = 1e-2;
        cfg
    }

    #[test]
    fn refuses_outside_illposed_range() {
        let mut cfg = base();
        cfg.s = 0.1;
        assert!(matches!(run_decoherence(&cfg), Err(Error::Regime(_))));
    }

    #[test]
    fn speed_selection_hits_target_size() {
        let cfg = base();
        let pt = cfg.derive(0.05).unwrap();
        let p = &cfg.params;
        let size = pt.speed_unrounded.powf(cfg.s)
            * pt.lambda.powf(-2.0 * p.sigma / (p.p - 1.0))
            * (pt.lambda / pt.nu).powf(0.5);
        assert!((size / cfg.epsilon - 1.0).abs() < 1e-12);
        assert!((pt.speed / pt.lattice - (pt.speed / pt.lattice).round()).abs() < 1e-9);
    }

    #[test]
    fn identical_amplitudes_give_zero_distances() {
        let mut cfg = base();
        cfg.a_prime = cfg.a;
        cfg.nu_list = vec![0.1];
        let report = run_decoherence(&cfg).unwrap();
        assert!(report.find_check("identical data distances").unwrap().passed);
    }

    #[test]
    fn spectral_weight_matches_resampled_field() {
        // Small case where the modulated field fits on an explicit x-grid.
        let params = ModelParams::new(1, 0.75, 3.0, 1, 1.0).unwrap();
        let ny = 128;
        let ly = 32.0;
        let mut cfg = DecoherenceConfig::new(params, Grid::line(ny, ly).unwrap());
        cfg.epsilon = 1.3;
        let nu = 0.5;
        let pt = cfg.derive(nu).unwrap();
        let w = cfg.profile.sample(&cfg.grid).unwrap();
        let via_weight = weighted_l2_norm(&w, &cfg.weight(&pt));

        // x = λy/ν: the same samples on the stretched grid are w(νx/λ).
        let gx = cfg.grid.stretched(pt.lambda / nu).unwrap();
        let scale = pt.lambda.powf(-2.0 * 0.75 / 2.0);
        let g = ComplexField::new(gx, w.values().to_vec()).unwrap().scale(Complex64::new(scale, 0.0));
        let u = modulate(&g, &[pt.speed]).unwrap();
        let direct = sobolev_norm(&u, cfg.s, 2.0, Homogeneity::Inhomogeneous).unwrap();
        assert!((via_weight / direct - 1.0).abs() < 1e-10, "{via_weight} vs {direct}");
    }
}
