//! Sensitivity of the omega = 10 published-protocol error level to the bath
//! parameters, around the pinned point (gamma, nT) = (0.1, 0.1). Lindblad
//! mode, dt = 1e-3, shared seed across rows.

use qfc_core::*;
use std::time::Instant;

fn main() {
    let proto = PublishedProtocol::for_gamma(0.1).unwrap();
    println!("== level vs (gamma, nT), lindblad w=10 published, n=2000 ==");
    for (gamma, n_t) in [
        (0.1, 0.1),
        (0.05, 0.1),
        (0.1, 0.05),
        (0.05, 0.05),
        (0.2, 0.1),
        (0.1, 0.2),
    ] {
        let t0 = Instant::now();
        let params = SimParams {
            k: 1.0,
            gamma,
            n_t,
            omega: 10.0,
            dt: 1e-3,
            t_burn: 85.0,
            t_avg: 120.0,
            seed: 8501,
        };
        let mut traj = TrajectoryConfig::new(
            params,
            ControlPolicy::published(params.omega, params.k, &proto),
        );
        traj.mode = ThermalMode::Lindblad;
        let est = estimate_steady_error(&EnsembleConfig::new(traj, 2000)).unwrap();
        println!(
            "gamma={gamma:<4} nT={n_t:<4}: eps={:.4e} se={:.2e}  [{:.1}s]",
            est.epsilon_mean,
            est.std_error,
            t0.elapsed().as_secs_f64()
        );
    }
}
