//! Calibration study for the acceptance targets: measures the steady-state
//! error, the paired c1 comparison, the theta^2 moment, and the c0 switch
//! sweep in each thermal mode. Run with --release.

use qfc_core::*;
use std::time::Instant;

fn base_params(omega: f64) -> SimParams {
    SimParams {
        k: 1.0,
        gamma: 0.1,
        n_t: 0.1,
        omega,
        dt: 5e-4,
        t_burn: 85.0,
        t_avg: 120.0,
        seed: 7001,
    }
}

fn cfg(params: SimParams, policy: ControlPolicy, mode: ThermalMode, n: usize) -> EnsembleConfig {
    let mut traj = TrajectoryConfig::new(params, policy);
    traj.mode = mode;
    EnsembleConfig::new(traj, n)
}

fn main() {
    let modes = [
        ThermalMode::Lindblad,
        ThermalMode::Diffusive,
        ThermalMode::Jump,
    ];
    let proto = PublishedProtocol::for_gamma(0.1).unwrap();

    println!("== A: epsilon and paired c1 comparison (n=2000, dt=5e-4) ==");
    println!("targets: eps(10k) ~ 3.3e-3 [2.31,4.29]e-3; diff(10k) ~ -1.3e-3 [-1.95,-0.65]e-3; diff(20k) ~ -0.4e-3 [-0.7,-0.1]e-3");
    for mode in modes {
        for omega in [10.0, 20.0] {
            let t0 = Instant::now();
            let params = base_params(omega);
            let c1_pub = published_coefficients(omega, 1.0, &proto).c1;
            let pub_cfg = cfg(
                params,
                ControlPolicy::explicit(ProtocolCoefficients::linear(0.0, c1_pub)),
                mode,
                2000,
            );
            let half_cfg = cfg(
                params,
                ControlPolicy::explicit(ProtocolCoefficients::linear(0.0, -0.5)),
                mode,
                2000,
            );
            let d = paired_difference(&pub_cfg, &half_cfg).unwrap();
            println!(
                "{:9} w={omega:4}: eps_pub={:.4e} eps_half={:.4e} diff={:+.4e} se={:.2e}  c1_pub={c1_pub:.4}  [{:.1}s]",
                mode.name(),
                d.mean_a,
                d.mean_b,
                d.mean,
                d.std_error,
                t0.elapsed().as_secs_f64()
            );
        }
    }

    println!("\n== B: theta^2 at omega=0, c1=-0.5 (n=2000) ==");
    println!("target: 0.019048 +-10% -> [0.01714, 0.02095]");
    for mode in modes {
        let t0 = Instant::now();
        let params = base_params(0.0);
        let c = cfg(
            params,
            ControlPolicy::explicit(ProtocolCoefficients::linear(0.0, -0.5)),
            mode,
            2000,
        );
        let est = estimate_steady_error(&c).unwrap();
        println!(
            "{:9}: theta2={:.5e} se={:.1e}  eps={:.4e}  [{:.1}s]",
            mode.name(),
            est.theta2_mean,
            est.theta2_std_error,
            est.epsilon_mean,
            t0.elapsed().as_secs_f64()
        );
    }

    println!("\n== C: c0 switch sweep, diff = eps(c0=0) - eps(c0=pi/2) (n=600) ==");
    println!("target: sign change in omega/k in [30, 60], reference ~45");
    for mode in [
        ThermalMode::Lindblad,
        ThermalMode::Jump,
        ThermalMode::Diffusive,
    ] {
        let t0 = Instant::now();
        let mut params = base_params(0.0);
        params.t_avg = 60.0;
        let base = cfg(params, ControlPolicy::aligned(), mode, 600);
        let ratios = [20.0, 30.0, 40.0, 45.0, 50.0, 55.0, 60.0, 70.0];
        let sweep = sweep_switch_point(&base, &proto, &ratios).unwrap();
        print!("{:9}: ", mode.name());
        for p in &sweep.points {
            print!("{:.0}:{:+.2e}({:.0e}) ", p.omega_over_k, p.diff, p.diff_se);
        }
        println!();
        println!(
            "           crossing = {:?}  [{:.1}s]",
            sweep.crossing,
            t0.elapsed().as_secs_f64()
        );
    }
}
