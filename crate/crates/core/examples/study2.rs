//! Follow-up calibration: the c1-off comparison against the published
//! protocol, dt sensitivity of the headline error and of the theta^2
//! moment, and optimizer recovery of the omega = 0 optimum.

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

    println!("== A: paired diff eps(c1_pub) - eps(c1=0), n=2000 ==");
    println!("targets: w=10 in [-1.95,-0.65]e-3; w=20 in [-0.7,-0.1]e-3");
    for (mode, omega, dt) in [
        (ThermalMode::Lindblad, 10.0, 5e-4),
        (ThermalMode::Lindblad, 20.0, 5e-4),
        (ThermalMode::Jump, 10.0, 5e-4),
        (ThermalMode::Jump, 20.0, 5e-4),
        (ThermalMode::Lindblad, 10.0, 1e-3),
        (ThermalMode::Lindblad, 20.0, 1e-3),
    ] {
        let t0 = Instant::now();
        let params = base_params(omega, dt, 7201);
        let c1_pub = published_coefficients(omega, 1.0, &proto).c1;
        let pub_cfg = cfg(
            params,
            ControlPolicy::explicit(ProtocolCoefficients::linear(0.0, c1_pub)),
            mode,
            2000,
        );
        let zero_cfg = cfg(
            params,
            ControlPolicy::explicit(ProtocolCoefficients::linear(0.0, 0.0)),
            mode,
            2000,
        );
        let d = paired_difference(&pub_cfg, &zero_cfg).unwrap();
        println!(
            "{:9} w={omega:4} dt={dt:6.0e}: eps_pub={:.4e} eps_zero={:.4e} diff={:+.4e} se={:.2e}  [{:.1}s]",
            mode.name(),
            d.mean_a,
            d.mean_b,
            d.mean,
            d.std_error,
            t0.elapsed().as_secs_f64()
        );
    }

    println!("\n== B: lindblad eps at w=10, published c1, dt scan ==");
    println!("target: [2.31, 4.29]e-3");
    for (dt, n) in [(1e-3, 2000), (2.5e-4, 1000), (1e-4, 500)] {
        let t0 = Instant::now();
        let params = base_params(10.0, dt, 7301);
        let c = cfg(
            params,
            ControlPolicy::published(10.0, 1.0, &proto),
            ThermalMode::Lindblad,
            n,
        );
        let est = estimate_steady_error(&c).unwrap();
        println!(
            "dt={dt:6.0e} n={n:4}: eps={:.4e} se={:.2e}  [{:.1}s]",
            est.epsilon_mean,
            est.std_error,
            t0.elapsed().as_secs_f64()
        );
    }

    println!("\n== C: diffusive theta^2 at w=0, c1=-0.5, dt/scheme scan ==");
    println!("target: [0.01714, 0.02095]");
    for (dt, n, scheme) in [
        (2.5e-4, 1000, Scheme::Milstein),
        (1e-4, 500, Scheme::Milstein),
        (5e-4, 1000, Scheme::Euler),
    ] {
        let t0 = Instant::now();
        let params = base_params(0.0, dt, 7401);
        let mut c = cfg(
            params,
            ControlPolicy::explicit(ProtocolCoefficients::linear(0.0, -0.5)),
            ThermalMode::Diffusive,
            n,
        );
        c.traj.scheme = scheme;
        let est = estimate_steady_error(&c).unwrap();
        println!(
            "dt={dt:6.0e} n={n:4} {:8}: theta2={:.5e} se={:.1e} eps={:.4e}  [{:.1}s]",
            scheme.name(),
            est.theta2_mean,
            est.theta2_std_error,
            est.epsilon_mean,
            t0.elapsed().as_secs_f64()
        );
    }

    println!("\n== D: optimizer recovery at w=0 (target c1=-0.5 +-0.05) ==");
    for seed in [21, 22, 23] {
        let t0 = Instant::now();
        let mut params = base_params(0.0, 1e-3, seed);
        params.t_burn = 30.0;
        params.t_avg = 40.0;
        let ens = cfg(
            params,
            ControlPolicy::explicit(ProtocolCoefficients::linear(0.0, -0.3)),
            ThermalMode::Diffusive,
            256,
        );
        let opts = OptimizeOptions {
            dims: 1,
            budget: 40,
            init: ProtocolCoefficients::linear(0.0, -0.3),
            ..OptimizeOptions::default()
        };
        let res = optimize_coefficients(&ens, &opts).unwrap();
        println!(
            "seed={seed}: c1={:+.4} objective={:.4e} fresh={:.4e} evals={} converged={}  [{:.1}s]",
            res.coeffs.c1,
            res.objective,
            res.fresh_objective,
            res.evals,
            res.converged,
            t0.elapsed().as_secs_f64()
        );
    }
}
