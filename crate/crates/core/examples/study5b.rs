//! Companion to study5: is the paired c1 benefit at omega = 10 sensitive to
//! the thermal background level? Runs the published-vs-zero difference at
//! half the pinned gamma.

use qfc_core::*;

fn main() {
    let proto = PublishedProtocol::for_gamma(0.1).unwrap();
    for (gamma, omega) in [(0.05, 10.0), (0.05, 20.0)] {
        let params = SimParams {
            k: 1.0,
            gamma,
            n_t: 0.1,
            omega,
            dt: 1e-3,
            t_burn: 85.0,
            t_avg: 120.0,
            seed: 8502,
        };
        let c1 = published_coefficients(omega, params.k, &proto).c1;
        let mk = |c: ProtocolCoefficients| {
            let mut traj = TrajectoryConfig::new(params, ControlPolicy::explicit(c));
            traj.mode = ThermalMode::Lindblad;
            EnsembleConfig::new(traj, 2000)
        };
        let d = paired_difference(
            &mk(ProtocolCoefficients::linear(0.0, c1)),
            &mk(ProtocolCoefficients::linear(0.0, 0.0)),
        )
        .unwrap();
        println!(
            "gamma={gamma} w={omega}: pub={:.4e} zero={:.4e} diff={:+.4e} se={:.2e}",
            d.mean_a, d.mean_b, d.mean, d.std_error
        );
    }
}
