//! `fnls` command line front end.

mod inputs;

use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fnls::evolution::evolve;
use fnls::experiments::{
    run_decoherence, run_dispersive_decay, run_galilean_error, run_scattering_probe, run_small_dispersion,
    Config, DecoherenceConfig, DispersiveConfig, ExperimentReport, GalileanConfig, ScatteringConfig,
    SmallDispersionConfig,
};
use fnls::observables::{spacetime_norm, NormVariant, SpacetimeNormSpec};
use fnls::soliton::{default_seed, petviashvili_solve, traveling_wave_check};
use fnls::{classify_regime, critical_exponents, snapshot, RegimeReport};

#[derive(Parser)]
#[command(name = "fnls", version, about = "Fractional NLS laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Critical exponents and well-posedness regime.
    Exponents {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        sigma: f64,
        /// Regularity; defaults to s_c.
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
    },
    /// Time evolution with FNLS1 snapshots and diagnostics.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Space-time norm of a trajectory written by `evolve`.
    Norms {
        #[arg(long)]
        traj: PathBuf,
        /// Time exponent; `inf` allowed.
        #[arg(long)]
        q: f64,
        /// Space exponent; `inf` allowed.
        #[arg(long)]
        r: f64,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        #[arg(long, value_enum)]
        variant: Variant,
        /// Overrides the sigma recorded with the trajectory.
        #[arg(long)]
        sigma: Option<f64>,
        /// CSV file to append to; defaults to `<traj>/norms.csv`.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Dispersive decay of the frequency-localized kernel.
    Dispersive(ExperimentArgs),
    /// Small-dispersion limit against the explicit zero-dispersion flow.
    SmallDispersion(ExperimentArgs),
    /// Pseudo-Galilean almost-invariance.
    Galilean(ExperimentArgs),
    /// Decoherence of two nearby data.
    Decohere(ExperimentArgs),
    /// Small-data scattering probe.
    Scatter(ExperimentArgs),
    /// Traveling profile by Petviashvili iteration.
    Soliton {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write the compared fields as FNLS1 files.
    #[arg(long)]
    save_fields: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Plain,
    Tilde,
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Exponents { d, p, sigma, s } => exponents(d, p, sigma, s),
        Command::Evolve { config, out } => evolve_cmd(&config, &out),
        Command::Norms { traj, q, r, s, variant, sigma, csv } => norms(&traj, q, r, s, variant, sigma, csv),
        Command::Dispersive(a) => experiment(&a, |cfg, keep| {
            let mut c = DispersiveConfig::from_config(cfg)?;
            c.keep_fields = keep;
            run_dispersive_decay(&c)
        }),
        Command::SmallDispersion(a) => experiment(&a, |cfg, keep| {
            let mut c = SmallDispersionConfig::from_config(cfg)?;
            c.keep_fields = keep;
            run_small_dispersion(&c)
        }),
        Command::Galilean(a) => experiment(&a, |cfg, keep| {
            let mut c = GalileanConfig::from_config(cfg)?;
            c.keep_fields = keep;
            run_galilean_error(&c)
        }),
        Command::Decohere(a) => experiment(&a, |cfg, keep| {
            let mut c = DecoherenceConfig::from_config(cfg)?;
            c.keep_fields = keep;
            run_decoherence(&c)
        }),
        Command::Scatter(a) => experiment(&a, |cfg, keep| {
            let mut c = ScatteringConfig::from_config(cfg)?;
            c.keep_fields = keep;
            run_scattering_probe(&c)
        }),
        Command::Soliton { config, out } => soliton(&config, &out),
    }
}

fn exponents(d: usize, p: f64, sigma: f64, s: Option<f64>) -> Result<()> {
    let s = s.unwrap_or_else(|| critical_exponents(d, p, sigma).0);
    let report = classify_regime(d, p, sigma, s);
    print!("{report}");
    println!();
    println!("{}", RegimeReport::CSV_HEADER);
    println!("{}", report.csv_row());
    Ok(())
}

fn evolve_cmd(config: &Path, out: &Path) -> Result<()> {
    let input = inputs::evolve_input(config)?;
    let traj = evolve(&input.u0, &input.evolve)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut csv = String::from("time,mass,energy,linf,boundary_amplitude\n");
    for (k, ((t, u), diag)) in traj.times.iter().zip(&traj.fields).zip(&traj.diagnostics).enumerate() {
        snapshot::save(&out.join(inputs::snapshot_name(k)), u)?;
        let _ = writeln!(
            csv,
            "{t:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            diag.mass,
            diag.energy,
            u.max_abs(),
            u.boundary_amplitude()
        );
    }
    fs::write(out.join(inputs::DIAGNOSTICS_FILE), csv)?;
    fs::write(
        out.join(inputs::RUN_FILE),
        inputs::run_record(&traj.params, traj.dt, traj.snapshot_stride),
    )?;
    println!("snapshots      : {}", traj.len());
    println!("dt             : {}", traj.dt);
    println!("mass drift     : {:e}", traj.mass_drift());
    println!("energy drift   : {:e}", traj.energy_drift());
    println!("output         : {}", out.display());
    Ok(())
}

fn norms(
    traj_dir: &Path,
    q: f64,
    r: f64,
    s: f64,
    variant: Variant,
    sigma: Option<f64>,
    csv: Option<PathBuf>,
) -> Result<()> {
    let (traj, stride) = inputs::load_trajectory(traj_dir, sigma)?;
    let (variant, name) = match variant {
        Variant::Plain => (NormVariant::Plain, "plain"),
        Variant::Tilde => (NormVariant::Tilde, "tilde"),
    };
    let spec = SpacetimeNormSpec { q, r, s, sigma: traj.params.sigma, variant };
    let value = spacetime_norm(&traj, &spec)?;
    println!("{value:.12e}");

    let path = csv.unwrap_or_else(|| traj_dir.join("norms.csv"));
    let fresh = !path.exists();
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .with_context(|| format!("opening {}", path.display()))?;
    if fresh {
        writeln!(file, "q,r,s,variant,stride,value")?;
    }
    writeln!(file, "{q},{r},{s},{name},{stride},{value:.17e}")?;
    Ok(())
}

fn experiment<F>(args: &ExperimentArgs, run: F) -> Result<()>
where
    F: FnOnce(&Config, bool) -> fnls::Result<ExperimentReport>,
{
    let cfg = Config::load(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let report = run(&cfg, args.save_fields)?;
    report.write(&args.out)?;
    if args.save_fields {
        report.write_fields(&args.out)?;
    }
    print!("{}", report.summary());
    Ok(())
}

fn soliton(config: &Path, out: &Path) -> Result<()> {
    let input = inputs::soliton_input(config)?;
    let cfg = &input.soliton;
    let seed = default_seed(cfg, &input.grid)?;
    let result = petviashvili_solve(cfg, &seed)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    snapshot::save(&out.join("Q.fnls"), &result.q)?;

    let mut csv = String::from("iter,residual,M_n\n");
    for (i, (res, m)) in result
        .residual_history
        .iter()
        .zip(&result.stabilization_factor_history)
        .enumerate()
    {
        let _ = writeln!(csv, "{i},{res:.17e},{m:.17e}");
    }
    fs::write(out.join("residuals.csv"), csv)?;

    let mismatch = if result.converged {
        Some(traveling_wave_check(&result, cfg, input.t_end, input.dt)?)
    } else {
        None
    };
    let mut summary = String::new();
    let p = &cfg.params;
    let _ = writeln!(summary, "d                  = {}", p.d);
    let _ = writeln!(summary, "sigma              = {}", p.sigma);
    let _ = writeln!(summary, "p                  = {}", p.p);
    let _ = writeln!(summary, "omega              = {}", cfg.omega);
    let _ = writeln!(summary, "v                  = {:?}", cfg.v);
    let _ = writeln!(summary, "gamma              = {}", cfg.gamma);
    let _ = writeln!(summary, "grid_n             = {:?}", input.grid.shape());
    let _ = writeln!(summary, "grid_extent        = {:?}", input.grid.extents());
    let _ = writeln!(summary, "coercivity_min     = {:e}", result.coercivity_min);
    let _ = writeln!(summary, "converged          = {}", result.converged);
    let _ = writeln!(summary, "iterations         = {}", result.residual_history.len());
    let _ = writeln!(summary, "final_residual     = {:e}", result.residual_history.last().copied().unwrap_or(f64::NAN));
    let _ = writeln!(
        summary,
        "final_M            = {}",
        result.stabilization_factor_history.last().copied().unwrap_or(f64::NAN)
    );
    let _ = writeln!(summary, "traveling_t_end    = {}", input.t_end);
    let _ = writeln!(summary, "traveling_dt       = {}", input.dt);
    match mismatch {
        Some(m) => {
            let _ = writeln!(summary, "traveling_mismatch = {m:e}");
        }
        None => {
            let _ = writeln!(summary, "traveling_mismatch = not computed (profile did not converge)");
        }
    }
    fs::write(out.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}
