//! Ensemble estimation: parallel trajectory batches with per-trajectory
//! counter-based RNG streams, steady-state error averages, and
//! common-random-number paired comparisons.

use crate::error::EngineError;
use crate::params::SimParams;
use crate::sme::{simulate_trajectory, TrajectoryConfig};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Independent stream for one trajectory: the master seed keys the cipher,
/// the trajectory index selects the stream. Streams are statistically
/// independent and reproducible regardless of thread scheduling.
pub fn trajectory_rng(seed: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub traj: TrajectoryConfig,
    pub n_traj: usize,
}

impl EnsembleConfig {
    pub fn new(traj: TrajectoryConfig, n_traj: usize) -> Self {
        Self { traj, n_traj }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnsembleEstimate {
    pub epsilon_mean: f64,
    pub std_error: f64,
    pub theta2_mean: f64,
    pub theta2_std_error: f64,
    /// Ensemble mean of az at the end of the run (burn-in plus window).
    pub final_az_mean: f64,
    pub final_az_std_error: f64,
    pub n_traj: usize,
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn run_batch(cfg: &EnsembleConfig) -> Result<Vec<crate::sme::TrajectorySummary>, EngineError> {
    if cfg.n_traj == 0 {
        return Err(EngineError::EmptyEnsemble);
    }
    let seed = cfg.traj.params.seed;
    (0..cfg.n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(seed, i as u64);
            simulate_trajectory(&cfg.traj, &mut rng).map_err(|e| EngineError::Trajectory {
                index: i as u64,
                seed,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Steady-state error estimate: each trajectory burns in for t_burn, then
/// time-averages over t_avg; the ensemble mean and its standard error follow
/// from the per-trajectory averages.
pub fn estimate_steady_error(cfg: &EnsembleConfig) -> Result<EnsembleEstimate, EngineError> {
    let runs = run_batch(cfg)?;
    let eps: Vec<f64> = runs.iter().map(|r| r.mean_epsilon).collect();
    let th2: Vec<f64> = runs.iter().map(|r| r.mean_theta2).collect();
    let az: Vec<f64> = runs
        .iter()
        .map(|r| -r.final_state.a * r.final_state.theta.cos())
        .collect();
    let (epsilon_mean, std_error) = mean_se(&eps);
    let (theta2_mean, theta2_std_error) = mean_se(&th2);
    let (final_az_mean, final_az_std_error) = mean_se(&az);
    Ok(EnsembleEstimate {
        epsilon_mean,
        std_error,
        theta2_mean,
        theta2_std_error,
        final_az_mean,
        final_az_std_error,
        n_traj: cfg.n_traj,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct PairedDifference {
    /// Mean of (a - b) per-trajectory error differences.
    pub mean: f64,
    pub std_error: f64,
    pub mean_a: f64,
    pub se_a: f64,
    pub mean_b: f64,
    pub se_b: f64,
    pub n_traj: usize,
}

/// Common-random-number comparison of two configurations. Trajectory i of
/// each branch uses the identical RNG stream, so the difference estimator
/// cancels the shared noise; the branches must consume draws in the same
/// order (same thermal mode) for the pairing to bite.
pub fn paired_difference(
    a: &EnsembleConfig,
    b: &EnsembleConfig,
) -> Result<PairedDifference, EngineError> {
    assert_eq!(a.n_traj, b.n_traj, "paired branches need equal n_traj");
    let runs_a = run_batch(a)?;
    let runs_b = run_batch(b)?;
    let da: Vec<f64> = runs_a
        .iter()
        .zip(&runs_b)
        .map(|(x, y)| x.mean_epsilon - y.mean_epsilon)
        .collect();
    let (mean, std_error) = mean_se(&da);
    let ea: Vec<f64> = runs_a.iter().map(|r| r.mean_epsilon).collect();
    let eb: Vec<f64> = runs_b.iter().map(|r| r.mean_epsilon).collect();
    let (mean_a, se_a) = mean_se(&ea);
    let (mean_b, se_b) = mean_se(&eb);
    Ok(PairedDifference {
        mean,
        std_error,
        mean_a,
        se_a,
        mean_b,
        se_b,
        n_traj: a.n_traj,
    })
}

/// Default burn-in: ten relaxation times of the slowest active process.
/// Inactive processes (zero rate) contribute nothing; with everything off
/// the fallback is 10 time units.
pub fn burn_in_heuristic(p: &SimParams) -> f64 {
    let mut t: f64 = 0.0;
    let gamma_eff = p.gamma * (1.0 + 2.0 * p.n_t);
    if gamma_eff > 0.0 {
        t = t.max(10.0 / gamma_eff);
    }
    if p.omega > 0.0 {
        t = t.max(5.0 * PI / p.omega);
    }
    if p.k > 0.0 {
        t = t.max(10.0 / p.k);
    }
    if t == 0.0 {
        10.0
    } else {
        t
    }
}
