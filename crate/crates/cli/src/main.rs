//! qfc: Monte Carlo simulator and protocol optimizer for measurement-based
//! feedback control of a continuously monitored qubit.

mod config;
mod output;

use config::Config;
use output::{EnsembleRow, Manifest};
use qfc_core::*;
use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<OptimizeError> for CliError {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::BudgetTooSmall { .. } | OptimizeError::TooFewPoints { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

const USAGE: &str = "\
usage: qfc <mode> [--key value]... [--config file]...

modes:
  simulate   one trajectory, decimated path to CSV
  ensemble   steady-state error estimate over n_traj trajectories
  sweep      c0 = 0 vs c0 = pi/2 branch comparison over omega_grid
  optimize   coefficient search minimizing the steady-state error
  fit        fit c1(omega/k) = -A - B(1 - exp(-r omega/k)) to a points file
  check      built-in verification battery

keys and defaults:
";

fn print_usage() {
    print!("{USAGE}");
    for (k, v) in config::KNOWN_KEYS {
        let v = if v.is_empty() { "(unset)" } else { v };
        println!("  {k:13} {v}");
    }
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        print_usage();
        return;
    }
    let Some(mode) = args.first() else {
        print_usage();
        std::process::exit(2);
    };
    let code = match run(mode, &args[1..]) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qfc: {e}");
            match e {
                CliError::Config(_) => 2,
                CliError::Numerical(_) => 3,
                _ => 1,
            }
        }
    };
    std::process::exit(code);
}

fn run(mode: &str, flag_args: &[String]) -> Result<(), CliError> {
    let mut cfg = Config::defaults();
    cfg.apply_flags(flag_args)?;

    let workers = cfg.usize("workers")?;
    if workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot set workers: {e}")))?;
    }

    let t0 = Instant::now();
    match mode {
        "simulate" => simulate(&cfg, t0),
        "ensemble" => ensemble(&cfg, t0),
        "sweep" => sweep(&cfg, t0),
        "optimize" => optimize(&cfg, t0),
        "fit" => fit(&cfg, t0),
        "check" => check(&cfg),
        other => Err(CliError::Config(format!(
            "unknown mode '{other}' (simulate|ensemble|sweep|optimize|fit|check)"
        ))),
    }
}

fn out_paths(cfg: &Config) -> Option<(PathBuf, PathBuf)> {
    let base = cfg.get("out");
    if base.is_empty() {
        return None;
    }
    Some((
        PathBuf::from(format!("{base}.csv")),
        PathBuf::from(format!("{base}.manifest.json")),
    ))
}

fn finish_manifest(
    cfg: &Config,
    mode: &'static str,
    t0: Instant,
    outputs: Vec<String>,
    results: serde_json::Value,
    manifest_path: Option<PathBuf>,
) -> Result<(), CliError> {
    let Some(path) = manifest_path else {
        return Ok(());
    };
    let m = Manifest {
        mode,
        config: cfg
            .entries()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        seed: cfg.u64("seed")?,
        wall_time_s: t0.elapsed().as_secs_f64(),
        outputs,
        results,
        config_hash: cfg.hash(),
    };
    output::write_manifest(&path, &m)?;
    Ok(())
}

fn simulate(cfg: &Config, t0: Instant) -> Result<(), CliError> {
    let traj = cfg.trajectory_config()?;
    let mut rng = trajectory_rng(traj.params.seed, 0);
    let summary = simulate_trajectory(&traj, &mut rng)?;
    println!(
        "simulate: steps={} mean_epsilon={:.6e} mean_theta2={:.6e} final_a={:.6} final_theta={:.6}",
        summary.steps,
        summary.mean_epsilon,
        summary.mean_theta2,
        summary.final_state.a,
        summary.final_state.theta
    );
    let mut outputs = Vec::new();
    let manifest = out_paths(cfg).map(|(csv, man)| {
        outputs.push(csv.display().to_string());
        (csv, man)
    });
    if let Some((csv, _)) = &manifest {
        output::write_trajectory_csv(csv, &summary.points)?;
    }
    let results = serde_json::json!({
        "steps": summary.steps,
        "mean_epsilon": summary.mean_epsilon,
        "mean_theta2": summary.mean_theta2,
        "final_a": summary.final_state.a,
        "final_theta": summary.final_state.theta,
        "recorded_points": summary.points.len(),
    });
    finish_manifest(
        cfg,
        "simulate",
        t0,
        outputs,
        results,
        manifest.map(|(_, m)| m),
    )
}

fn ensemble(cfg: &Config, t0: Instant) -> Result<(), CliError> {
    let traj = cfg.trajectory_config()?;
    let n_traj = cfg.n_traj()?;
    let ens = EnsembleConfig::new(traj.clone(), n_traj);
    let est = estimate_steady_error(&ens)?;
    println!(
        "ensemble: n_traj={} epsilon_mean={:.6e} std_error={:.2e} theta2_mean={:.6e} final_az_mean={:.6}",
        est.n_traj, est.epsilon_mean, est.std_error, est.theta2_mean, est.final_az_mean
    );
    let mut outputs = Vec::new();
    let manifest = out_paths(cfg).map(|(csv, man)| {
        outputs.push(csv.display().to_string());
        (csv, man)
    });
    if let Some((csv, _)) = &manifest {
        let row = EnsembleRow::from_estimate(&traj.params, traj.policy.coeffs, &est);
        output::write_ensemble_csv(csv, &[row])?;
    }
    let results = serde_json::json!({
        "epsilon_mean": est.epsilon_mean,
        "std_error": est.std_error,
        "theta2_mean": est.theta2_mean,
        "theta2_std_error": est.theta2_std_error,
        "final_az_mean": est.final_az_mean,
        "final_az_std_error": est.final_az_std_error,
    });
    finish_manifest(
        cfg,
        "ensemble",
        t0,
        outputs,
        results,
        manifest.map(|(_, m)| m),
    )
}

fn sweep(cfg: &Config, t0: Instant) -> Result<(), CliError> {
    let mut traj = cfg.trajectory_config()?;
    let params = traj.params;
    let proto = cfg.protocol_table_row(params.gamma)?;
    if params.k <= 0.0 {
        return Err(CliError::Config("sweep needs k > 0".into()));
    }
    let n_traj = cfg.n_traj()?;
    traj.record_stride = 0;
    let base = EnsembleConfig::new(traj, n_traj);
    let grid = cfg.omega_grid()?;
    let sweep = sweep_switch_point(&base, &proto, &grid)?;

    for p in &sweep.points {
        println!(
            "sweep: omega/k={:6.2} c1={:+.4} eps(c0=0)={:.6e} eps(c0=pi/2)={:.6e} diff={:+.3e} se={:.1e}",
            p.omega_over_k, p.c1, p.eps_zero, p.eps_half_pi, p.diff, p.diff_se
        );
    }
    match sweep.crossing {
        Some(x) => println!("sweep: crossing at omega/k = {x:.3}"),
        None => println!("sweep: no crossing inside the grid"),
    }

    let mut outputs = Vec::new();
    let manifest = out_paths(cfg).map(|(csv, man)| {
        outputs.push(csv.display().to_string());
        (csv, man)
    });
    if let Some((csv, _)) = &manifest {
        let mut rows = Vec::new();
        let mut row_params = Vec::new();
        for p in &sweep.points {
            let mut rp = params;
            rp.omega = p.omega_over_k * params.k;
            rp.t_burn = burn_in_heuristic(&rp);
            row_params.push(rp);
        }
        for (p, rp) in sweep.points.iter().zip(&row_params) {
            rows.push(EnsembleRow {
                params: rp,
                coeffs: ProtocolCoefficients::linear(0.0, p.c1),
                n_traj,
                epsilon_mean: p.eps_zero,
                std_error: p.se_zero,
            });
            rows.push(EnsembleRow {
                params: rp,
                coeffs: ProtocolCoefficients::linear(std::f64::consts::FRAC_PI_2, p.c1),
                n_traj,
                epsilon_mean: p.eps_half_pi,
                std_error: p.se_half_pi,
            });
        }
        output::write_ensemble_csv(csv, &rows)?;
    }
    let results = serde_json::json!({
        "crossing": sweep.crossing,
        "points": sweep.points.iter().map(|p| serde_json::json!({
            "omega_over_k": p.omega_over_k,
            "c1": p.c1,
            "eps_zero": p.eps_zero,
            "eps_half_pi": p.eps_half_pi,
            "diff": p.diff,
            "diff_se": p.diff_se,
        })).collect::<Vec<_>>(),
    });
    finish_manifest(cfg, "sweep", t0, outputs, results, manifest.map(|(_, m)| m))
}

fn optimize(cfg: &Config, t0: Instant) -> Result<(), CliError> {
    let mut traj = cfg.trajectory_config()?;
    traj.record_stride = 0;
    let n_traj = cfg.n_traj()?;
    let ens = EnsembleConfig::new(traj, n_traj);
    let opts = OptimizeOptions {
        dims: cfg.usize("dims")?,
        budget: cfg.usize("budget")?,
        init: cfg.coefficients()?,
        ..OptimizeOptions::default()
    };
    if !(1..=4).contains(&opts.dims) {
        return Err(CliError::Config(format!(
            "dims must be 1..=4, got {}",
            opts.dims
        )));
    }
    let res = optimize_coefficients(&ens, &opts)?;
    println!(
        "optimize: c0={:+.6} c1={:+.6} c2={:+.6} c3={:+.6} objective={:.6e} fresh={:.6e} evals={} converged={}",
        res.coeffs.c0,
        res.coeffs.c1,
        res.coeffs.c2,
        res.coeffs.c3,
        res.objective,
        res.fresh_objective,
        res.evals,
        res.converged
    );
    let results = serde_json::json!({
        "c0": res.coeffs.c0,
        "c1": res.coeffs.c1,
        "c2": res.coeffs.c2,
        "c3": res.coeffs.c3,
        "objective": res.objective,
        "fresh_objective": res.fresh_objective,
        "evals": res.evals,
        "converged": res.converged,
    });
    let manifest = out_paths(cfg).map(|(_, man)| man);
    finish_manifest(cfg, "optimize", t0, Vec::new(), results, manifest)
}

fn fit(cfg: &Config, t0: Instant) -> Result<(), CliError> {
    let path = cfg.get("points");
    if path.is_empty() {
        return Err(CliError::Config(
            "fit needs points=<csv with omega_over_k,c1 rows>".into(),
        ));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
    let mut pts = Vec::new();
    for line in text.lines() {
        let mut it = line.split(',');
        let (Some(a), Some(b)) = (it.next(), it.next()) else {
            continue;
        };
        if let (Ok(x), Ok(y)) = (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            pts.push((x, y));
        }
    }
    let fitres = fit_c1_curve(&pts)?;
    println!(
        "fit: A={:.6} B={:.6} r={:.6} m={:+.3e} sigma={:.3e} (n={})",
        fitres.a,
        fitres.b,
        fitres.r,
        fitres.m,
        fitres.sigma,
        pts.len()
    );
    let results = serde_json::json!({
        "a": fitres.a,
        "b": fitres.b,
        "r": fitres.r,
        "m": fitres.m,
        "sigma": fitres.sigma,
        "n_points": pts.len(),
    });
    let manifest = out_paths(cfg).map(|(_, man)| man);
    finish_manifest(cfg, "fit", t0, Vec::new(), results, manifest)
}

fn check(cfg: &Config) -> Result<(), CliError> {
    let mut failures = 0;
    let mut report = |name: &str, ok: bool, detail: String| {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    {
        let eq = thermal_equilibrium(0.1);
        let p = SimParams {
            k: 0.0,
            gamma: 0.1,
            n_t: 0.1,
            omega: 0.0,
            dt: 1e-4,
            t_burn: 0.0,
            t_avg: 1.0,
            seed: 0,
        };
        let out = sme_step(
            &from_polar(eq),
            0.0,
            0.0,
            0.0,
            &p,
            &StepNoise::default(),
            ThermalMode::Lindblad,
            Scheme::Euler,
        )?;
        let drift = (out.state.az - from_polar(eq).az).abs();
        report(
            "thermal_equilibrium_fixed_point",
            drift < 1e-15,
            format!("drift {drift:.1e}"),
        );
    }

    {
        let target = theta2_steady_state(1.0, 0.1, 0.1, 0.0, -0.5)?;
        let mut v = 0.1;
        for _ in 0..200_000 {
            v = theta2_moment_step(v, 1.0, 0.1, 0.1, 0.0, -0.5, 1e-3)?;
        }
        let gap = (v - target).abs();
        report(
            "theta2_moment_fixed_point",
            gap < 1e-9,
            format!("integrated {v:.6e} vs closed form {target:.6e}"),
        );
    }

    {
        let traj = cfg.trajectory_config()?;
        let mut short = traj.clone();
        short.params.t_burn = 0.1;
        short.params.t_avg = 0.5;
        let run = |seed| -> Result<u64, CliError> {
            let mut rng = trajectory_rng(seed, 0);
            Ok(simulate_trajectory(&short, &mut rng)?
                .mean_epsilon
                .to_bits())
        };
        let (a, b) = (run(12345)?, run(12345)?);
        report(
            "trajectory_determinism",
            a == b,
            format!("{a:#x} vs {b:#x}"),
        );
    }

    {
        let b = from_polar(PolarState::new(0.8, 0.1));
        let got = expectation_sigma_alpha(&b, 0.3);
        let want = 0.8 * 0.4f64.cos();
        report(
            "measurement_expectation",
            (got - want).abs() < 1e-14,
            format!("{got:.12} vs {want:.12}"),
        );
    }

    {
        let state = PolarState::new(0.8, 0.3);
        let d = polar_coefficients(&state, 0.1, 0.7, 1.0)?;
        let p = SimParams {
            k: 1.0,
            gamma: 0.0,
            n_t: 0.0,
            omega: 0.0,
            dt: 1e-8,
            t_burn: 0.0,
            t_avg: 1.0,
            seed: 0,
        };
        let b = from_polar(state);
        let step = |dw: f64| -> Result<f64, CliError> {
            let out = sme_step(
                &b,
                0.0,
                0.1,
                0.7,
                &p,
                &StepNoise::measurement_only(dw),
                ThermalMode::Lindblad,
                Scheme::Euler,
            )?;
            Ok(f64::atan2(out.state.ax, -out.state.az))
        };
        let root = p.dt.sqrt();
        let f_theta = (0.5 * (step(root)? + step(-root)?) - state.theta) / p.dt;
        report(
            "polar_reduction_consistency",
            (f_theta - d.f_theta).abs() < 1e-3,
            format!("probe {f_theta:.6} vs coefficients {:.6}", d.f_theta),
        );
    }

    if failures > 0 {
        return Err(CliError::Numerical(format!("{failures} check(s) failed")));
    }
    Ok(())
}
