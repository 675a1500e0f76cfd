//! Conditioned-state engine on the Bloch vector, restricted to the x-z plane.
//!
//! Measurement of sigma_alpha at strength k, homodyne unraveling:
//!
//!   da = -4k (a - m (m.a)) dt + sqrt(8k) (m - (m.a) a) dW
//!   dy = (m.a) dt + dW / sqrt(8k)
//!
//! with measurement axis m(alpha) = (-sin alpha, 0, -cos alpha), chosen so
//! that alpha = 0 measures the ground-state axis and theta = atan2(ax, -az)
//! makes the aligned (zero-backaction-noise) choice alpha = -theta.
//!
//! Feedback Hamiltonian H = hbar (mu/2) sigma_y rotates the vector at
//! dtheta/dt = -mu. Thermal relaxation at rates gamma_down = gamma (nT + 1),
//! gamma_up = gamma nT enters in one of three unravelings (`ThermalMode`):
//! the ensemble-averaged Lindblad drift, a diffusive unraveling, or a
//! quantum-jump unraveling. All three have the same ensemble mean.

use crate::bloch::BlochVector;
use crate::bloch::{wrap_angle, PolarState};
use crate::error::EngineError;
use crate::params::SimParams;
use crate::polar::Scheme;
use crate::policy::{feedback_rotation, ControlPolicy};
use rand::Rng;
use rand_distr::StandardNormal;

/// Bloch direction measured at angle alpha.
pub fn measurement_axis(alpha: f64) -> BlochVector {
    let (s, c) = alpha.sin_cos();
    BlochVector::new(-s, 0.0, -c)
}

/// <sigma_alpha> = m(alpha) . a; equal to a cos(alpha + theta) in polar form.
pub fn expectation_sigma_alpha(state: &BlochVector, alpha: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    -s * state.ax - c * state.az
}

/// Unraveling of the thermal coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThermalMode {
    /// Deterministic Lindblad drift: the observer does not monitor the bath,
    /// so the conditional state carries the averaged thermal flow.
    #[default]
    Lindblad,
    /// Diffusive unraveling with one Wiener increment per bath channel.
    /// Preserves purity; kicks are tangent on the Bloch sphere.
    Diffusive,
    /// Quantum-jump unraveling: nonlinear no-jump drift plus rare resets to
    /// the ground state (decay) or excited state (heating).
    Jump,
}

impl ThermalMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lindblad" => Some(ThermalMode::Lindblad),
            "diffusive" => Some(ThermalMode::Diffusive),
            "jump" => Some(ThermalMode::Jump),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ThermalMode::Lindblad => "lindblad",
            ThermalMode::Diffusive => "diffusive",
            ThermalMode::Jump => "jump",
        }
    }
}

/// Random numbers consumed by one step. Draw order per mode is fixed:
/// lindblad uses dw only; diffusive uses dw, dv_down, dv_up; jump uses dw,
/// u_jump. Unused fields are zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepNoise {
    pub dw: f64,
    pub dv_down: f64,
    pub dv_up: f64,
    pub u_jump: f64,
}

impl StepNoise {
    pub fn measurement_only(dw: f64) -> Self {
        Self {
            dw,
            ..Self::default()
        }
    }

    pub fn draw(rng: &mut impl Rng, dt: f64, mode: ThermalMode) -> Self {
        let root = dt.sqrt();
        let dw = root * rng.sample::<f64, _>(StandardNormal);
        match mode {
            ThermalMode::Lindblad => Self::measurement_only(dw),
            ThermalMode::Diffusive => Self {
                dw,
                dv_down: root * rng.sample::<f64, _>(StandardNormal),
                dv_up: root * rng.sample::<f64, _>(StandardNormal),
                u_jump: 0.0,
            },
            ThermalMode::Jump => Self {
                dw,
                dv_down: 0.0,
                dv_up: 0.0,
                u_jump: rng.gen(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepResult {
    pub state: BlochVector,
    /// Measurement-record increment; zero when k = 0 (no record exists).
    pub dy: f64,
}

/// One Ito step of the conditioned dynamics. `t` is carried for diagnostics
/// only. The returned state is renormalized onto the unit ball.
#[allow(clippy::too_many_arguments)]
pub fn sme_step(
    state: &BlochVector,
    t: f64,
    alpha: f64,
    mu: f64,
    params: &SimParams,
    noise: &StepNoise,
    mode: ThermalMode,
    scheme: Scheme,
) -> Result<StepResult, EngineError> {
    let (ax, az) = (state.ax, state.az);
    let (k, gamma, n_t, dt) = (params.k, params.gamma, params.n_t, params.dt);
    let dw = noise.dw;

    let mut d_ax = 0.0;
    let mut d_az = 0.0;
    let mut dy = 0.0;

    if k > 0.0 {
        let (sa, ca) = alpha.sin_cos();
        let (mx, mz) = (-sa, -ca);
        let s = mx * ax + mz * az;
        let root = (8.0 * k).sqrt();
        let bx = root * (mx - s * ax);
        let bz = root * (mz - s * az);
        d_ax += -4.0 * k * (ax - mx * s) * dt + bx * dw;
        d_az += -4.0 * k * (az - mz * s) * dt + bz * dw;
        if scheme == Scheme::Milstein {
            let lx = bx * root * (-mx * ax - s) + bz * root * (-mz * ax);
            let lz = bx * root * (-mx * az) + bz * root * (-mz * az - s);
            let bump = 0.5 * (dw * dw - dt);
            d_ax += lx * bump;
            d_az += lz * bump;
        }
        dy = s * dt + dw / root;
    }

    d_ax += mu * az * dt;
    d_az += -mu * ax * dt;

    let gamma_down = gamma * (n_t + 1.0);
    let gamma_up = gamma * n_t;
    let big_gamma = gamma_down + gamma_up;
    let mut jumped = false;
    let mut jump_state = BlochVector::new(0.0, 0.0, -1.0);

    if big_gamma > 0.0 {
        match mode {
            ThermalMode::Lindblad | ThermalMode::Diffusive => {
                let az_eq = -(gamma_down - gamma_up) / big_gamma;
                d_ax += -0.5 * big_gamma * ax * dt;
                d_az += -big_gamma * (az - az_eq) * dt;
                if mode == ThermalMode::Diffusive {
                    let rd = gamma_down.sqrt();
                    let ru = gamma_up.sqrt();
                    d_ax += rd * (1.0 + az - ax * ax) * noise.dv_down
                        + ru * (1.0 - az - ax * ax) * noise.dv_up;
                    d_az += rd * (-ax * (1.0 + az)) * noise.dv_down
                        + ru * (ax * (1.0 - az)) * noise.dv_up;
                }
            }
            ThermalMode::Jump => {
                d_ax += 0.5 * (gamma_down - gamma_up) * az * ax * dt;
                d_az += 0.5 * (gamma_up - gamma_down) * (1.0 - az * az) * dt;
                let p_down = gamma_down * 0.5 * (1.0 + az) * dt;
                let p_up = gamma_up * 0.5 * (1.0 - az) * dt;
                if noise.u_jump < p_down {
                    jumped = true;
                } else if noise.u_jump < p_down + p_up {
                    jumped = true;
                    jump_state = BlochVector::new(0.0, 0.0, 1.0);
                }
            }
        }
    }

    let mut next = if jumped {
        jump_state
    } else {
        BlochVector::new(ax + d_ax, 0.0, az + d_az)
    };
    let norm = next.norm();
    if norm > 1.0 {
        next.ax /= norm;
        next.az /= norm;
    }
    if !next.ax.is_finite() || !next.az.is_finite() {
        return Err(EngineError::NonFinite {
            t,
            ax: next.ax,
            az: next.az,
            alpha,
            mu,
            dw,
        });
    }
    Ok(StepResult { state: next, dy })
}

/// One decimated sample along a trajectory, in the polar variables plus the
/// control inputs and record increment of the step that produced it.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub a: f64,
    pub theta: f64,
    pub alpha: f64,
    pub mu: f64,
    pub dy: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryConfig {
    pub params: SimParams,
    pub policy: ControlPolicy,
    pub mode: ThermalMode,
    pub scheme: Scheme,
    pub initial: PolarState,
    /// Record every this many steps; 0 disables path recording.
    pub record_stride: usize,
}

impl TrajectoryConfig {
    pub fn new(params: SimParams, policy: ControlPolicy) -> Self {
        Self {
            params,
            policy,
            mode: ThermalMode::default(),
            scheme: Scheme::default(),
            initial: crate::bloch::thermal_equilibrium(params.n_t),
            record_stride: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrajectorySummary {
    /// Time average of the error probability over the averaging window.
    pub mean_epsilon: f64,
    /// Time average of theta^2 over the averaging window.
    pub mean_theta2: f64,
    pub final_state: PolarState,
    pub steps: u64,
    pub points: Vec<TrajectoryPoint>,
}

/// Minimum averaging window, in units of dt.
pub const MIN_AVG_STEPS: f64 = 10.0;

/// Run one trajectory: burn-in for t_burn, then average the error probability
/// and theta^2 over t_avg. The caller is responsible for params validation.
pub fn simulate_trajectory(
    cfg: &TrajectoryConfig,
    rng: &mut impl Rng,
) -> Result<TrajectorySummary, EngineError> {
    let p = &cfg.params;
    let min = MIN_AVG_STEPS * p.dt;
    if p.t_avg < min {
        return Err(EngineError::WindowTooShort {
            t_avg: p.t_avg,
            min,
        });
    }
    let n_burn = (p.t_burn / p.dt).round() as u64;
    let n_avg = (p.t_avg / p.dt).round() as u64;

    let init = crate::bloch::from_polar(cfg.initial);
    let mut state = init;
    let mut acc_eps = 0.0;
    let mut acc_theta2 = 0.0;
    let mut points = Vec::new();

    if cfg.record_stride > 0 {
        let theta0 = cfg.initial.theta;
        points.push(TrajectoryPoint {
            t: 0.0,
            a: cfg.initial.a,
            theta: theta0,
            alpha: cfg.policy.alpha(theta0),
            mu: feedback_rotation(theta0, p.omega, p.dt),
            dy: 0.0,
            epsilon: 0.5 * (1.0 + init.az),
        });
    }

    let total = n_burn + n_avg;
    for step in 0..total {
        let t = step as f64 * p.dt;
        let theta = f64::atan2(state.ax, -state.az);
        let alpha = cfg.policy.alpha(theta);
        let mu = feedback_rotation(theta, p.omega, p.dt);
        let noise = StepNoise::draw(rng, p.dt, cfg.mode);
        let out = sme_step(&state, t, alpha, mu, p, &noise, cfg.mode, cfg.scheme)?;
        state = out.state;

        if step >= n_burn {
            let th = f64::atan2(state.ax, -state.az);
            acc_eps += 0.5 * (1.0 + state.az);
            acc_theta2 += th * th;
        }
        if cfg.record_stride > 0 && (step + 1) % cfg.record_stride as u64 == 0 {
            let th = f64::atan2(state.ax, -state.az);
            points.push(TrajectoryPoint {
                t: (step + 1) as f64 * p.dt,
                a: state.norm(),
                theta: th,
                alpha,
                mu,
                dy: out.dy,
                epsilon: 0.5 * (1.0 + state.az),
            });
        }
    }

    let theta_f = wrap_angle(f64::atan2(state.ax, -state.az));
    Ok(TrajectorySummary {
        mean_epsilon: acc_eps / n_avg as f64,
        mean_theta2: acc_theta2 / n_avg as f64,
        final_state: PolarState::new(state.norm(), theta_f),
        steps: total,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{error_probability, thermal_equilibrium};
    use crate::policy::ProtocolCoefficients;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn params(k: f64, gamma: f64, n_t: f64, omega: f64) -> SimParams {
        SimParams {
            k,
            gamma,
            n_t,
            omega,
            dt: 1e-4,
            t_burn: 0.0,
            t_avg: 1.0,
            seed: 7,
        }
    }

    #[test]
    fn axis_examples() {
        let m0 = measurement_axis(0.0);
        assert!((m0.ax - 0.0).abs() < 1e-15 && (m0.az + 1.0).abs() < 1e-15);
        let m90 = measurement_axis(FRAC_PI_2);
        assert!((m90.ax + 1.0).abs() < 1e-15 && m90.az.abs() < 1e-15);
    }

    #[test]
    fn expectation_matches_polar_form() {
        let state = crate::bloch::from_polar(PolarState::new(0.8, 0.1));
        let got = expectation_sigma_alpha(&state, 0.3);
        assert!((got - 0.8 * 0.4f64.cos()).abs() < 1e-14);
    }

    #[test]
    fn ground_state_is_dark_point() {
        let p = params(1.0, 0.0, 0.0, 0.0);
        let ground = BlochVector::new(0.0, 0.0, -1.0);
        let noise = StepNoise::measurement_only(0.3);
        let out = sme_step(
            &ground,
            0.0,
            0.0,
            0.0,
            &p,
            &noise,
            ThermalMode::Lindblad,
            Scheme::Euler,
        )
        .unwrap();
        assert_eq!(out.state.ax, 0.0);
        assert_eq!(out.state.az, -1.0);
        assert!((out.dy - (1e-4 + 0.3 / 8f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn record_increment() {
        let p = params(1.0, 0.0, 0.0, 0.0);
        let state = crate::bloch::from_polar(PolarState::new(0.8, 0.1));
        let noise = StepNoise::measurement_only(0.01);
        let out = sme_step(
            &state,
            0.0,
            0.3,
            0.0,
            &p,
            &noise,
            ThermalMode::Lindblad,
            Scheme::Euler,
        )
        .unwrap();
        let s = 0.8 * 0.4f64.cos();
        assert!((out.dy - (s * 1e-4 + 0.01 / 8f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn thermal_equilibrium_is_fixed() {
        let p = params(0.0, 0.1, 0.1, 0.0);
        let eq = crate::bloch::from_polar(thermal_equilibrium(0.1));
        let out = sme_step(
            &eq,
            0.0,
            0.0,
            0.0,
            &p,
            &StepNoise::default(),
            ThermalMode::Lindblad,
            Scheme::Euler,
        )
        .unwrap();
        assert!((out.state.az - eq.az).abs() < 1e-16);
        assert!(out.state.ax.abs() < 1e-16);
    }

    #[test]
    fn lindblad_relaxation_matches_exponential() {
        let p = params(0.0, 0.4, 0.25, 0.0);
        let big_gamma = 0.4 * 1.5;
        let az_eq = -1.0 / 1.5;
        let mut state = BlochVector::new(0.0, 0.0, 1.0);
        let n = 10_000;
        for i in 0..n {
            let t = i as f64 * p.dt;
            state = sme_step(
                &state,
                t,
                0.0,
                0.0,
                &p,
                &StepNoise::default(),
                ThermalMode::Lindblad,
                Scheme::Euler,
            )
            .unwrap()
            .state;
        }
        let t = n as f64 * p.dt;
        let expect = az_eq + (1.0 - az_eq) * (-big_gamma * t).exp();
        assert!((state.az - expect).abs() < 1e-4, "{} vs {expect}", state.az);
    }

    #[test]
    fn feedback_rotates_toward_ground() {
        let p = SimParams {
            dt: 1e-3,
            ..params(0.0, 0.0, 0.0, 100.0)
        };
        let mut state = crate::bloch::from_polar(PolarState::new(1.0, 0.3));
        for i in 0..50 {
            let theta = f64::atan2(state.ax, -state.az);
            let mu = feedback_rotation(theta, p.omega, p.dt);
            state = sme_step(
                &state,
                i as f64 * p.dt,
                0.0,
                mu,
                &p,
                &StepNoise::default(),
                ThermalMode::Lindblad,
                Scheme::Euler,
            )
            .unwrap()
            .state;
        }
        let theta = f64::atan2(state.ax, -state.az);
        assert!(theta.abs() < 1e-9, "theta = {theta}");
        assert!((state.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn slow_feedback_rotation_rate() {
        let p = params(0.0, 0.0, 0.0, 0.5);
        let mut state = crate::bloch::from_polar(PolarState::new(1.0, 1.0));
        let n = 10_000;
        for i in 0..n {
            let theta = f64::atan2(state.ax, -state.az);
            let mu = feedback_rotation(theta, p.omega, p.dt);
            state = sme_step(
                &state,
                i as f64 * p.dt,
                0.0,
                mu,
                &p,
                &StepNoise::default(),
                ThermalMode::Lindblad,
                Scheme::Euler,
            )
            .unwrap()
            .state;
        }
        let theta = f64::atan2(state.ax, -state.az);
        assert!((theta - 0.5).abs() < 1e-3, "theta = {theta}");
    }

    #[test]
    fn jump_resets_exactly() {
        let p = params(0.0, 0.2, 0.5, 0.0);
        let state = crate::bloch::from_polar(PolarState::new(0.9, 0.4));
        let down = StepNoise {
            u_jump: 0.0,
            ..StepNoise::default()
        };
        let out = sme_step(
            &state,
            0.0,
            0.0,
            0.0,
            &p,
            &down,
            ThermalMode::Jump,
            Scheme::Euler,
        )
        .unwrap();
        assert_eq!((out.state.ax, out.state.az), (0.0, -1.0));

        let az = state.az;
        let p_down = 0.2 * 1.5 * 0.5 * (1.0 + az) * p.dt;
        let up = StepNoise {
            u_jump: p_down + 1e-9,
            ..StepNoise::default()
        };
        let out = sme_step(
            &state,
            0.0,
            0.0,
            0.0,
            &p,
            &up,
            ThermalMode::Jump,
            Scheme::Euler,
        )
        .unwrap();
        assert_eq!((out.state.ax, out.state.az), (0.0, 1.0));

        let none = StepNoise {
            u_jump: 0.5,
            ..StepNoise::default()
        };
        let out = sme_step(
            &state,
            0.0,
            0.0,
            0.0,
            &p,
            &none,
            ThermalMode::Jump,
            Scheme::Euler,
        )
        .unwrap();
        assert!(out.state.ax != 0.0);
    }

    #[test]
    fn diffusive_kicks_keep_purity() {
        let p = params(0.0, 0.3, 0.2, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut state = crate::bloch::from_polar(PolarState::new(1.0, 0.7));
        for i in 0..10_000 {
            let noise = StepNoise::draw(&mut rng, p.dt, ThermalMode::Diffusive);
            state = sme_step(
                &state,
                i as f64 * p.dt,
                0.0,
                0.0,
                &p,
                &noise,
                ThermalMode::Diffusive,
                Scheme::Euler,
            )
            .unwrap()
            .state;
        }
        // over t = 1 a purity-breaking unraveling would have relaxed the norm
        // most of the way to the Lindblad equilibrium (~0.71); the Euler
        // discretization itself only random-walks the norm by O(sqrt(n) dt)
        assert!((state.norm() - 1.0).abs() < 0.05, "norm = {}", state.norm());
    }

    #[test]
    fn milstein_correction_is_second_order() {
        let p = params(1.0, 0.0, 0.0, 0.0);
        let state = crate::bloch::from_polar(PolarState::new(0.7, 0.5));
        let dw = 3.0 * p.dt.sqrt();
        let noise = StepNoise::measurement_only(dw);
        let e = sme_step(
            &state,
            0.0,
            0.2,
            0.0,
            &p,
            &noise,
            ThermalMode::Lindblad,
            Scheme::Euler,
        )
        .unwrap();
        let m = sme_step(
            &state,
            0.0,
            0.2,
            0.0,
            &p,
            &noise,
            ThermalMode::Lindblad,
            Scheme::Milstein,
        )
        .unwrap();
        let gap = ((e.state.ax - m.state.ax).powi(2) + (e.state.az - m.state.az).powi(2)).sqrt();
        assert!(gap > 0.0 && gap < 20.0 * dw * dw, "gap = {gap}");
    }

    #[test]
    fn nonfinite_noise_is_reported() {
        let p = params(1.0, 0.0, 0.0, 0.0);
        let state = crate::bloch::from_polar(PolarState::new(0.7, 0.5));
        let noise = StepNoise::measurement_only(f64::NAN);
        assert!(matches!(
            sme_step(
                &state,
                0.5,
                0.0,
                0.0,
                &p,
                &noise,
                ThermalMode::Lindblad,
                Scheme::Euler
            ),
            Err(EngineError::NonFinite { .. })
        ));
    }

    #[test]
    fn trajectory_thermal_only_sits_at_equilibrium() {
        let mut cfg = TrajectoryConfig::new(
            params(0.0, 0.1, 0.1, 0.0),
            ControlPolicy::explicit(ProtocolCoefficients::linear(0.0, 0.0)),
        );
        cfg.params.t_avg = 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = simulate_trajectory(&cfg, &mut rng).unwrap();
        let eq_eps = error_probability(thermal_equilibrium(0.1));
        assert!((out.mean_epsilon - eq_eps).abs() < 1e-12);
        assert!(out.mean_theta2.abs() < 1e-24);
    }

    #[test]
    fn trajectory_is_deterministic() {
        let cfg = TrajectoryConfig {
            record_stride: 100,
            ..TrajectoryConfig::new(
                params(1.0, 0.1, 0.1, 10.0),
                ControlPolicy::explicit(ProtocolCoefficients::linear(0.0, -0.5)),
            )
        };
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            simulate_trajectory(&cfg, &mut rng).unwrap()
        };
        let (a, b) = (run(42), run(42));
        assert_eq!(a.mean_epsilon.to_bits(), b.mean_epsilon.to_bits());
        assert_eq!(a.points.len(), b.points.len());
        for (pa, pb) in a.points.iter().zip(&b.points) {
            assert_eq!(pa.theta.to_bits(), pb.theta.to_bits());
            assert_eq!(pa.dy.to_bits(), pb.dy.to_bits());
        }
        let c = run(43);
        assert_ne!(a.mean_epsilon.to_bits(), c.mean_epsilon.to_bits());
    }

    #[test]
    fn trajectory_records_on_stride() {
        let mut cfg = TrajectoryConfig::new(params(1.0, 0.0, 0.0, 0.0), ControlPolicy::aligned());
        cfg.params.t_avg = 0.01;
        cfg.record_stride = 10;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = simulate_trajectory(&cfg, &mut rng).unwrap();
        assert_eq!(out.points.len(), 11);
        assert_eq!(out.points[0].t, 0.0);
        assert!((out.points[10].t - 0.01).abs() < 1e-12);
    }

    #[test]
    fn window_too_short() {
        let mut cfg = TrajectoryConfig::new(params(1.0, 0.0, 0.0, 0.0), ControlPolicy::aligned());
        cfg.params.t_avg = 5e-4;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(
            simulate_trajectory(&cfg, &mut rng),
            Err(EngineError::WindowTooShort { .. })
        ));
    }

    #[test]
    fn mode_parse_roundtrip() {
        for mode in [
            ThermalMode::Lindblad,
            ThermalMode::Diffusive,
            ThermalMode::Jump,
        ] {
            assert_eq!(ThermalMode::parse(mode.name()), Some(mode));
        }
        assert_eq!(ThermalMode::parse("kraus"), None);
    }
}
