use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fnls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fnls"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn exponents_prints_text_and_csv() {
    let text = stdout(&fnls(&["exponents", "--d", "1", "--p", "7", "--sigma", "0.75"]));
    assert!(text.contains("regime : CRITICAL_LWP"), "{text}");
    assert!(text.contains("d,p,sigma,s,s_c,s_g,regime,notes"));
    assert!(text.contains("1,7,0.75,0.25,0.25,0.125,CRITICAL_LWP"));

    let text = stdout(&fnls(&["exponents", "--d", "1", "--p", "3", "--sigma", "0.75", "--s", "0.5"]));
    assert!(text.contains("SUBCRITICAL_LWP"), "{text}");

    let text = stdout(&fnls(&["exponents", "--d", "1", "--p", "3", "--sigma", "0.75", "--s", "-0.1"]));
    assert!(text.contains("regime : ILLPOSED_RANGE"), "{text}");
}

#[test]
fn evolve_then_norms_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "evolve.cfg",
        "# smoke run\nsigma = 0.75\np = 3\nt_end = 0.5\ndt = 0.01\nstride = 10\nn = 128\nextent = 40\n",
    );
    let traj = dir.path().join("traj");
    let traj_s = traj.to_str().unwrap();
    stdout(&fnls(&["evolve", "--config", &cfg, "--out", traj_s]));

    let diag = fs::read_to_string(traj.join("diagnostics.csv")).unwrap();
    let mut lines = diag.lines();
    assert_eq!(lines.next(), Some("time,mass,energy,linf,boundary_amplitude"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    assert!((rows[5][0] - 0.5).abs() < 1e-12);
    let m0 = rows[0][1];
    for r in &rows {
        assert!((r[1] - m0).abs() / m0 < 1e-10);
    }

    let bytes = fs::read(traj.join("snap_000000.fnls")).unwrap();
    assert_eq!(&bytes[..4], b"FNLS");
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
    assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 1);
    assert_eq!(u64::from_le_bytes(bytes[12..20].try_into().unwrap()), 128);
    assert_eq!(f64::from_le_bytes(bytes[20..28].try_into().unwrap()), 40.0);
    assert_eq!(bytes.len(), 28 + 128 * 16);

    let text = stdout(&fnls(&[
        "norms", "--traj", traj_s, "--q", "inf", "--r", "2", "--s", "0", "--variant", "plain",
    ]));
    let value: f64 = text.trim().parse().unwrap();
    assert!((value - m0.sqrt()).abs() < 1e-9 * value, "{value} vs {}", m0.sqrt());

    stdout(&fnls(&[
        "norms", "--traj", traj_s, "--q", "4", "--r", "inf", "--s", "0", "--variant", "tilde",
    ]));
    let csv = fs::read_to_string(traj.join("norms.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "q,r,s,variant,stride,value");
    assert!(lines[1].starts_with("inf,2,0,plain,10,"));
    assert!(lines[2].starts_with("4,inf,0,tilde,10,"));
}

#[test]
fn norms_rejects_inadmissible_pair() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "e.cfg", "t_end = 0.1\ndt = 0.05\nn = 64\nextent = 40\n");
    let traj = dir.path().join("t");
    stdout(&fnls(&["evolve", "--config", &cfg, "--out", traj.to_str().unwrap()]));
    let out = fnls(&[
        "norms", "--traj", traj.to_str().unwrap(), "--q", "3", "--r", "3", "--s", "0", "--variant", "plain",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("inadmissible"));
}

#[test]
fn unknown_config_key_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "sigma = 0.75\nsigmaa = 1\n");
    let out = fnls(&["small-dispersion", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigmaa"));
}

#[test]
fn small_dispersion_writes_report_and_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sd.cfg",
        "sigma = 0.75\np = 3\nnu_list = 0.1, 0.05, 0.025\nn = 128\nextent = 40\ndt = 0.01\n",
    );
    let out = dir.path().join("out");
    let text = stdout(&fnls(&[
        "small-dispersion", "--config", &cfg, "--out", out.to_str().unwrap(), "--save-fields",
    ]));
    assert!(text.contains("PASS error slope"), "{text}");
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(csv.starts_with("series,nu,t,hk_error,"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("sweep,")).count(), 3);
    assert!(fs::read_to_string(out.join("summary.txt")).unwrap().contains("[checks]"));
    assert!(out.join("nu0.05.fnls").exists());
}

#[test]
fn experiments_refuse_out_of_regime_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().join("o");
    let cfg = write(dir.path(), "s.cfg", "p = 3\nn = 64\nextent = 40\n");
    let out = fnls(&["scatter", "--config", &cfg, "--out", o.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("regime"));

    let cfg = write(dir.path(), "g.cfg", "d = 2\nsigma = 0.45\nv = 1, 0\nn = 16\nextent = 10\n");
    let out = fnls(&["galilean", "--config", &cfg, "--out", o.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma below d/4"));
}

#[test]
fn soliton_writes_profile_residuals_and_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sol.cfg", "sigma = 0.75\np = 3\nomega = 1\nv = 0.5\n");
    let out = dir.path().join("sol");
    stdout(&fnls(&["soliton", "--config", &cfg, "--out", out.to_str().unwrap()]));
    let q = fs::read(out.join("Q.fnls")).unwrap();
    assert_eq!(&q[..4], b"FNLS");
    let res = fs::read_to_string(out.join("residuals.csv")).unwrap();
    assert_eq!(res.lines().next(), Some("iter,residual,M_n"));
    let last: Vec<f64> = res.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!(last[1] < 1e-10 && (last[2] - 1.0).abs() < 1e-8);
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    let mismatch: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("traveling_mismatch"))
        .and_then(|l| l.trim_start_matches([' ', '=']).trim().parse().ok())
        .unwrap();
    assert!(mismatch < 1e-3, "{mismatch}");
}
