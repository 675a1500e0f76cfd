//! CSV and manifest writers. Floats are written with 17 significant digits
//! so files round-trip bit-exactly.

use crate::CliError;
use qfc_core::{EnsembleEstimate, ProtocolCoefficients, SimParams, TrajectoryPoint};
use std::io::Write;
use std::path::Path;

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub const TRAJECTORY_HEADER: &str = "t,a,theta,alpha,mu,dy,epsilon";
pub const ENSEMBLE_HEADER: &str =
    "omega_over_k,c0,c1,c2,c3,gamma,nT,n_traj,dt,t_burn,t_avg,epsilon_mean,std_error,seed";

pub fn write_trajectory_csv(path: &Path, points: &[TrajectoryPoint]) -> Result<(), CliError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{TRAJECTORY_HEADER}")?;
    for p in points {
        writeln!(
            f,
            "{},{},{},{},{},{},{}",
            fmt(p.t),
            fmt(p.a),
            fmt(p.theta),
            fmt(p.alpha),
            fmt(p.mu),
            fmt(p.dy),
            fmt(p.epsilon)
        )?;
    }
    Ok(())
}

pub struct EnsembleRow<'a> {
    pub params: &'a SimParams,
    pub coeffs: ProtocolCoefficients,
    pub n_traj: usize,
    pub epsilon_mean: f64,
    pub std_error: f64,
}

impl<'a> EnsembleRow<'a> {
    pub fn from_estimate(
        params: &'a SimParams,
        coeffs: ProtocolCoefficients,
        est: &EnsembleEstimate,
    ) -> Self {
        Self {
            params,
            coeffs,
            n_traj: est.n_traj,
            epsilon_mean: est.epsilon_mean,
            std_error: est.std_error,
        }
    }
}

pub fn write_ensemble_csv(path: &Path, rows: &[EnsembleRow]) -> Result<(), CliError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{ENSEMBLE_HEADER}")?;
    for r in rows {
        let p = r.params;
        let ratio = if p.k > 0.0 { p.omega / p.k } else { f64::NAN };
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt(ratio),
            fmt(r.coeffs.c0),
            fmt(r.coeffs.c1),
            fmt(r.coeffs.c2),
            fmt(r.coeffs.c3),
            fmt(p.gamma),
            fmt(p.n_t),
            r.n_traj,
            fmt(p.dt),
            fmt(p.t_burn),
            fmt(p.t_avg),
            fmt(r.epsilon_mean),
            fmt(r.std_error),
            p.seed
        )?;
    }
    Ok(())
}

pub struct Manifest {
    pub mode: &'static str,
    pub config: Vec<(String, String)>,
    pub seed: u64,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub results: serde_json::Value,
    pub config_hash: u64,
}

pub fn write_manifest(path: &Path, m: &Manifest) -> Result<(), CliError> {
    let config: serde_json::Map<String, serde_json::Value> = m
        .config
        .iter()
        .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
        .collect();
    let doc = serde_json::json!({
        "mode": m.mode,
        "config": config,
        "seed": m.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_s": m.wall_time_s,
        "outputs": m.outputs,
        "results": m.results,
        "config_hash": format!("{:016x}", m.config_hash),
    });
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{}", serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}
