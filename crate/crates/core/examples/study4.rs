//! Coarse-step behavior of the headline error: the steady-state mean is
//! dominated by rare de-purification excursions, so a coarse Euler step that
//! clips the multiplicative tail reads low. Scan upward in dt to see how low.

use qfc_core::*;
use std::time::Instant;

fn main() {
    let proto = PublishedProtocol::for_gamma(0.1).unwrap();
    println!("== lindblad eps at w=10, published protocol, coarse-dt scan, n=2000 ==");
    for (dt, scheme) in [
        (1e-3, Scheme::Milstein),
        (2e-3, Scheme::Euler),
        (5e-3, Scheme::Euler),
        (1e-2, Scheme::Euler),
        (5e-3, Scheme::Milstein),
    ] {
        let t0 = Instant::now();
        let params = SimParams {
            k: 1.0,
            gamma: 0.1,
            n_t: 0.1,
            omega: 10.0,
            dt,
            t_burn: 85.0,
            t_avg: 120.0,
            seed: 8401,
        };
        let mut traj = TrajectoryConfig::new(params, ControlPolicy::published(10.0, 1.0, &proto));
        traj.scheme = scheme;
        let cfg = EnsembleConfig::new(traj, 2000);
        let est = estimate_steady_error(&cfg).unwrap();
        println!(
            "dt={dt:6.0e} {:8}: eps={:.4e} se={:.2e}  [{:.1}s]",
            format!("{scheme:?}").to_lowercase(),
            est.epsilon_mean,
            est.std_error,
            t0.elapsed().as_secs_f64()
        );
    }
}
