use std::f64::consts::PI;

use fnls::soliton::{default_seed, petviashvili_solve, soliton_residual, traveling_wave_check, SolitonConfig};
use fnls::{Grid, Error};

fn line() -> Grid {
    Grid::line(512, 32.0 * PI).unwrap()
}

#[test]
fn converges_for_rest_and_moving_profiles() {
    for v in [0.0, 0.5] {
        let cfg = SolitonConfig::new(1, 0.75, 3.0, 1.0, vec![v]).unwrap();
        let res = petviashvili_solve(&cfg, &default_seed(&cfg, &line()).unwrap()).unwrap();
        assert!(res.converged, "v = {v}");
        assert!(res.residual_history.len() <= 201);
        assert!(*res.residual_history.last().unwrap() < 1e-8);
        let m = *res.stabilization_factor_history.last().unwrap();
        assert!((m - 1.0).abs() < 1e-8, "M = {m}");
        assert!(soliton_residual(&res.q, &cfg).unwrap() < 1e-8);
        assert!(res.coercivity_min > 0.0);
    }
}

#[test]
fn classical_profile_is_sqrt2_sech() {
    let grid = line();
    let cfg = SolitonConfig::new(1, 1.0, 3.0, 1.0, vec![0.0]).unwrap();
    let res = petviashvili_solve(&cfg, &default_seed(&cfg, &grid).unwrap()).unwrap();
    let x = grid.coords(0);
    let err = res
        .q
        .values()
        .iter()
        .zip(&x)
        .map(|(q, &x)| (q.norm() - 2f64.sqrt() / x.cosh()).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
}

#[test]
fn traveling_waves_follow_the_ansatz() {
    for (sigma, v, tol) in [(0.75, 0.0, 1e-4), (1.0, 0.5, 1e-4), (0.75, 0.5, 1e-3)] {
        let cfg = SolitonConfig::new(1, sigma, 3.0, 1.0, vec![v]).unwrap();
        let res = petviashvili_solve(&cfg, &default_seed(&cfg, &line()).unwrap()).unwrap();
        let mismatch = traveling_wave_check(&res, &cfg, 1.0, 1e-3).unwrap();
        assert!(mismatch < tol, "sigma {sigma}, v {v}: {mismatch}");
    }
}

#[test]
fn planar_profile_converges() {
    let grid = Grid::new(&[64, 64], &[8.0 * PI, 8.0 * PI]).unwrap();
    let cfg = SolitonConfig::new(2, 0.9, 3.0, 1.0, vec![0.4, 0.0]).unwrap();
    let res = petviashvili_solve(&cfg, &default_seed(&cfg, &grid).unwrap()).unwrap();
    assert!(res.converged);
    assert!(soliton_residual(&res.q, &cfg).unwrap() < 1e-8);
}

#[test]
fn unconverged_profile_is_not_checked() {
    let mut cfg = SolitonConfig::new(1, 0.75, 3.0, 1.0, vec![0.0]).unwrap();
    cfg.max_iter = 3;
    let res = petviashvili_solve(&cfg, &default_seed(&cfg, &line()).unwrap()).unwrap();
    assert!(!res.converged);
    assert!(matches!(traveling_wave_check(&res, &cfg, 1.0, 1e-3), Err(Error::InvalidParams(_))));
}
