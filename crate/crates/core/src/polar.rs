//! Polar-coordinate form of the conditioned dynamics, restricted to the x-z
//! plane: radius a and angle theta from the ground state. Used for the
//! reduced-model cross-checks and the theta^2 moment model; the Bloch-vector
//! engine in `sme` is the ground truth.
//!
//! With s = sin(alpha + theta), c = cos(alpha + theta):
//!
//!   dtheta = [-mu - 2k sin(2(alpha+theta)) (3 - 2/a^2)] dt - sqrt(8k) s / a dW
//!   da     = 4k s^2 (1/a - a) dt + sqrt(8k) c (1 - a^2) dW
//!
//! The angle convention matches `bloch::to_polar`: theta = atan2(ax, -az), so
//! the zero-diffusion (aligned) measurement is alpha = -theta.

use crate::bloch::{wrap_angle, PolarState};
use crate::error::EngineError;

pub const POLAR_MIN_RADIUS: f64 = 1e-6;

/// Drift and diffusion coefficients of the polar SDE pair at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarDrift {
    pub f_theta: f64,
    pub g_theta: f64,
    pub f_a: f64,
    pub g_a: f64,
}

/// SDE coefficients at `state` under measurement angle `alpha` and signed
/// feedback speed `mu`.
pub fn polar_coefficients(
    state: &PolarState,
    alpha: f64,
    mu: f64,
    k: f64,
) -> Result<PolarDrift, EngineError> {
    if state.a <= POLAR_MIN_RADIUS || !state.a.is_finite() {
        return Err(EngineError::PolarSingular { a: state.a });
    }
    let phase = alpha + state.theta;
    let (s, c) = phase.sin_cos();
    let root = (8.0 * k).sqrt();
    let a = state.a;
    Ok(PolarDrift {
        f_theta: -mu - 2.0 * k * (2.0 * phase).sin() * (3.0 - 2.0 / (a * a)),
        g_theta: -root * s / a,
        f_a: 4.0 * k * s * s * (1.0 / a - a),
        g_a: root * c * (1.0 - a * a),
    })
}

/// Time-stepping scheme for the measurement noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    Euler,
    #[default]
    Milstein,
}

impl Scheme {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "euler" => Some(Scheme::Euler),
            "milstein" => Some(Scheme::Milstein),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Euler => "euler",
            Scheme::Milstein => "milstein",
        }
    }
}

/// One step of the polar SDE pair driven by the measurement increment `dw`.
///
/// Milstein adds the single-noise correction 0.5 (g . grad) g (dw^2 - dt) to
/// both components. The radius is clamped back into (0, 1] after the step;
/// a step that lands at or below `POLAR_MIN_RADIUS` is an error.
pub fn polar_step(
    state: &PolarState,
    alpha: f64,
    mu: f64,
    k: f64,
    dt: f64,
    dw: f64,
    scheme: Scheme,
) -> Result<PolarState, EngineError> {
    let d = polar_coefficients(state, alpha, mu, k)?;
    let mut theta = state.theta + d.f_theta * dt + d.g_theta * dw;
    let mut a = state.a + d.f_a * dt + d.g_a * dw;

    if scheme == Scheme::Milstein {
        let phase = alpha + state.theta;
        let (s, c) = phase.sin_cos();
        let root = (8.0 * k).sqrt();
        let a0 = state.a;
        let dg_theta_dtheta = -root * c / a0;
        let dg_theta_da = root * s / (a0 * a0);
        let dg_a_dtheta = -root * s * (1.0 - a0 * a0);
        let dg_a_da = -2.0 * a0 * root * c;
        let bump = 0.5 * (dw * dw - dt);
        theta += (d.g_theta * dg_theta_dtheta + d.g_a * dg_theta_da) * bump;
        a += (d.g_theta * dg_a_dtheta + d.g_a * dg_a_da) * bump;
    }

    if a > 1.0 {
        a = 1.0;
    }
    if a <= POLAR_MIN_RADIUS || !a.is_finite() || !theta.is_finite() {
        return Err(EngineError::PolarSingular { a });
    }
    Ok(PolarState {
        a,
        theta: wrap_angle(theta),
    })
}

/// One Euler step of the closed moment equation for v = <theta^2> under the
/// linear protocol alpha = c1 theta:
///
///   dv/dt = 4 gamma nT - 2 omega <|theta|> + [8 k c1 (c1 + 1) - gamma] v
///
/// closed with the Gaussian relation <|theta|> = sqrt(2 v / pi).
pub fn theta2_moment_step(
    v: f64,
    k: f64,
    gamma: f64,
    n_t: f64,
    omega: f64,
    c1: f64,
    dt: f64,
) -> Result<f64, EngineError> {
    if v < 0.0 || !v.is_finite() {
        return Err(EngineError::NegativeTheta2 { value: v });
    }
    let mean_abs = (2.0 * v / std::f64::consts::PI).sqrt();
    let rate = 4.0 * gamma * n_t - 2.0 * omega * mean_abs + (8.0 * k * c1 * (c1 + 1.0) - gamma) * v;
    let next = v + rate * dt;
    Ok(next.max(0.0))
}

/// Steady state of the moment equation. Writing d = gamma - 8 k c1 (c1+1)
/// and b = 2 omega sqrt(2/pi), the fixed point solves
/// d u^2 + b u - 4 gamma nT = 0 for u = sqrt(v); requires d > 0.
pub fn theta2_steady_state(
    k: f64,
    gamma: f64,
    n_t: f64,
    omega: f64,
    c1: f64,
) -> Result<f64, EngineError> {
    let d = gamma - 8.0 * k * c1 * (c1 + 1.0);
    if d <= 0.0 {
        return Err(EngineError::Theta2Unstable { denominator: d });
    }
    let source = 4.0 * gamma * n_t;
    if omega == 0.0 {
        return Ok(source / d);
    }
    let b = 2.0 * omega * (2.0 / std::f64::consts::PI).sqrt();
    let u = (-b + (b * b + 4.0 * d * source).sqrt()) / (2.0 * d);
    Ok(u * u)
}
