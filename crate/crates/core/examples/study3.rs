//! Final calibration pass: burn-in dependence of the headline error, the
//! theta^2 moment at acceptance-scale statistics, the empirical c1 landscape
//! at omega = 0 with a proper steady-state window, and optimizer recovery
//! when the burn-in heuristic is respected.

use qfc_core::*;
use std::time::Instant;

fn base_params(omega: f64, dt: f64, seed: u64) -> SimParams {
    SimParams {
        k: 1.0,
        gamma: 0.1,
        n_t: 0.1,
        omega,
        dt,
        t_burn: 85.0,
        t_avg: 120.0,
        seed,
    }
}

fn cfg(params: SimParams, policy: ControlPolicy, mode: ThermalMode, n: usize) -> EnsembleConfig {
    let mut traj = TrajectoryConfig::new(params, policy);
    traj.mode = mode;
    EnsembleConfig::new(traj, n)
}

fn main() {
    let proto = PublishedProtocol::for_gamma(0.1).unwrap();

    println!("== A: lindblad eps(window) at w=10, published protocol, n=1000 ==");
    for (label, initial) in [
        ("thermal", thermal_equilibrium(0.1)),
        ("pure   ", PolarState::new(1.0, 0.0)),
    ] {
        for (t_burn, t_avg) in [
            (0.0, 5.0),
            (5.0, 5.0),
            (10.0, 10.0),
            (20.0, 20.0),
            (40.0, 40.0),
            (80.0, 40.0),
            (120.0, 80.0),
        ] {
            let t0 = Instant::now();
            let mut params = base_params(10.0, 1e-3, 8101);
            params.t_burn = t_burn;
            params.t_avg = t_avg;
            let mut c = cfg(
                params,
                ControlPolicy::published(10.0, 1.0, &proto),
                ThermalMode::Lindblad,
                1000,
            );
            c.traj.initial = initial;
            let est = estimate_steady_error(&c).unwrap();
            println!(
                "{label} window [{t_burn:5.1},{:5.1}]: eps={:.4e} se={:.2e}  [{:.1}s]",
                t_burn + t_avg,
                est.epsilon_mean,
                est.std_error,
                t0.elapsed().as_secs_f64()
            );
        }
    }

    println!("\n== A3: lindblad eps at w=10, acceptance window, seed 101 prefix ==");
    {
        let t0 = Instant::now();
        let params = base_params(10.0, 1e-3, 101);
        let c = cfg(
            params,
            ControlPolicy::published(10.0, 1.0, &proto),
            ThermalMode::Lindblad,
            1000,
        );
        let est = estimate_steady_error(&c).unwrap();
        println!(
            "n=1000: eps={:.4e} se={:.2e}  [{:.1}s]",
            est.epsilon_mean,
            est.std_error,
            t0.elapsed().as_secs_f64()
        );
    }

    println!("\n== B: diffusive theta^2 at w=0, c1=-0.5, acceptance scale ==");
    println!("target: [0.017143, 0.020952]");
    for (label, initial, n, seed) in [
        ("thermal", thermal_equilibrium(0.1), 4000, 701),
        ("pure   ", PolarState::new(1.0, 0.0), 1000, 702),
    ] {
        let t0 = Instant::now();
        let params = base_params(0.0, 3e-4, seed);
        let mut c = cfg(
            params,
            ControlPolicy::explicit(ProtocolCoefficients::linear(0.0, -0.5)),
            ThermalMode::Diffusive,
            n,
        );
        c.traj.initial = initial;
        let est = estimate_steady_error(&c).unwrap();
        println!(
            "{label} n={n}: theta2={:.5e} se={:.1e} eps={:.4e}  [{:.1}s]",
            est.theta2_mean,
            est.theta2_std_error,
            est.epsilon_mean,
            t0.elapsed().as_secs_f64()
        );
    }

    println!("\n== C: diffusive landscape at w=0, steady window, n=512 CRN ==");
    for i in 0..9 {
        let t0 = Instant::now();
        let c1 = -0.70 + 0.05 * i as f64;
        let params = base_params(0.0, 1e-3, 8301);
        let c = cfg(
            params,
            ControlPolicy::explicit(ProtocolCoefficients::linear(0.0, c1)),
            ThermalMode::Diffusive,
            512,
        );
        let est = estimate_steady_error(&c).unwrap();
        println!(
            "c1={c1:+.2}: eps={:.4e} se={:.1e} theta2={:.4e}  [{:.1}s]",
            est.epsilon_mean,
            est.std_error,
            est.theta2_mean,
            t0.elapsed().as_secs_f64()
        );
    }

    println!("\n== D: optimizer recovery at w=0, heuristic burn-in (target -0.5 +-0.05) ==");
    for seed in [21u64, 22, 23] {
        let t0 = Instant::now();
        let mut params = base_params(0.0, 1e-3, seed);
        params.t_avg = 60.0;
        let init = ProtocolCoefficients::linear(0.0, -0.3);
        let c = cfg(
            params,
            ControlPolicy::explicit(init),
            ThermalMode::Diffusive,
            256,
        );
        let opts = OptimizeOptions {
            budget: 40,
            init,
            ..OptimizeOptions::default()
        };
        let out = optimize_coefficients(&c, &opts).unwrap();
        println!(
            "seed={seed}: c1={:+.4} objective={:.4e} fresh={:.4e} evals={} converged={}  [{:.1}s]",
            out.coeffs.c1,
            out.objective,
            out.fresh_objective,
            out.evals,
            out.converged,
            t0.elapsed().as_secs_f64()
        );
    }
}
