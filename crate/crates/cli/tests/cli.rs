use std::path::Path;
use std::process::{Command, Output};

fn qfc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfc"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn qfc")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn missing_mode_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(&[], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_mode_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn unknown_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(&["simulate", "--tau", "3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("tau"), "{}", stderr(&out));
}

#[test]
fn bad_value_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(&["simulate", "--dt", "fast"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn invalid_params_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(&["simulate", "--dt", "-1e-4"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn zero_trajectories_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(&["ensemble", "--n_traj", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("n_traj"), "{}", stderr(&out));
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(
        &[
            "simulate", "--t_avg", "1e-4", "--t_burn", "0", "--dt", "1e-4",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn help_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("modes:"));
}

#[test]
fn simulate_writes_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(
        &[
            "simulate",
            "--t_burn",
            "0.5",
            "--t_avg",
            "1.0",
            "--record_stride",
            "100",
            "--out",
            "run",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,a,theta,alpha,mu,dy,epsilon"));
    let n_rows = lines.clone().count();
    let n_steps = (1.5f64 / 1e-4).round() as usize;
    assert_eq!(n_rows, 1 + n_steps / 100);
    for line in lines {
        assert_eq!(line.split(',').count(), 7, "bad row: {line}");
        for field in line.split(',') {
            field.parse::<f64>().unwrap();
        }
    }
    assert!(dir.path().join("run.manifest.json").exists());
}

#[test]
fn ensemble_csv_header_and_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(
        &[
            "ensemble", "--n_traj", "8", "--t_burn", "0.2", "--t_avg", "0.5", "--out", "ens",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("ens.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some(
            "omega_over_k,c0,c1,c2,c3,gamma,nT,n_traj,dt,t_burn,t_avg,epsilon_mean,std_error,seed"
        )
    );
    let row = lines.next().unwrap();
    assert_eq!(row.split(',').count(), 14);
    assert!(lines.next().is_none());
}

#[test]
fn manifest_rerun_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(
        &[
            "ensemble", "--n_traj", "6", "--t_burn", "0.2", "--t_avg", "0.5", "--seed", "42",
            "--out", "a",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let manifest = dir.path().join("a.manifest.json");
    let out2 = qfc(
        &[
            "ensemble",
            "--config",
            manifest.to_str().unwrap(),
            "--out",
            "b",
        ],
        dir.path(),
    );
    assert_eq!(out2.status.code(), Some(0), "{}", stderr(&out2));
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);

    let ja: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    let jb: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("b.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(ja["results"], jb["results"]);
    assert_eq!(ja["config_hash"], jb["config_hash"]);
}

#[test]
fn key_value_config_file_loads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "n_traj = 5\nt_burn = 0.2\nt_avg = 0.5\n# comment\n\nseed = 7\n",
    )
    .unwrap();
    let out = qfc(&["ensemble", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("n_traj=5"));
}

#[test]
fn flag_overrides_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n_traj = 5\nt_burn = 0.2\nt_avg = 0.5\n").unwrap();
    let out = qfc(
        &[
            "ensemble",
            "--config",
            cfg.to_str().unwrap(),
            "--n_traj",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("n_traj=3"), "{}", stdout(&out));
}

#[test]
fn fit_round_trips_synthetic_points() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("points.csv");
    let (a, b, r) = (0.5, 0.186, 0.476);
    let mut text = String::from("omega_over_k,c1\n");
    for i in 0..12 {
        let x = 2.0 + 6.0 * i as f64;
        let c1 = -a - b * (1.0 - (-r * x).exp());
        text.push_str(&format!("{x},{c1:.12e}\n"));
    }
    std::fs::write(&pts, text).unwrap();
    let out = qfc(
        &["fit", "--points", pts.to_str().unwrap(), "--out", "fit"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let j: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("fit.manifest.json")).unwrap(),
    )
    .unwrap();
    assert!((j["results"]["a"].as_f64().unwrap() - a).abs() < 1e-6);
    assert!((j["results"]["b"].as_f64().unwrap() - b).abs() < 1e-6);
    assert!((j["results"]["r"].as_f64().unwrap() - r).abs() < 1e-6);
}

#[test]
fn fit_without_points_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(&["fit"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(&["check"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}\n{}",
        stdout(&out),
        stderr(&out)
    );
    let text = stdout(&out);
    assert!(text.lines().filter(|l| l.starts_with("PASS ")).count() >= 5);
    assert!(!text.contains("FAIL"));
}

#[test]
fn simulate_honors_initial_state_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfc(
        &[
            "simulate",
            "--initial_a",
            "0.5",
            "--initial_theta",
            "1.5707963267948966",
            "--t_burn",
            "0",
            "--t_avg",
            "0.2",
            "--record_stride",
            "100",
            "--out",
            "fig4",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("fig4.csv")).unwrap();
    let first = csv.lines().nth(1).unwrap();
    let fields: Vec<f64> = first.split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(fields[0], 0.0);
    assert!((fields[1] - 0.5).abs() < 1e-12, "a0 = {}", fields[1]);
    assert!(
        (fields[2] - std::f64::consts::FRAC_PI_2).abs() < 1e-12,
        "theta0 = {}",
        fields[2]
    );

    let bad = qfc(&["simulate", "--initial_a", "1.5"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
}
