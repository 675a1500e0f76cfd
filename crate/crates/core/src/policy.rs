//! The feedback protocol family: measurement-angle law alpha(theta) and the
//! feedback rotation-speed law with its over-rotation clamp.

use crate::bloch::wrap_angle;
use std::f64::consts::FRAC_PI_2;

/// Coefficients of the measurement-angle law alpha = c0 + c1 t + c2 t^2 + c3 t^3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolCoefficients {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ProtocolCoefficients {
    pub fn linear(c0: f64, c1: f64) -> Self {
        Self {
            c0,
            c1,
            c2: 0.0,
            c3: 0.0,
        }
    }

    /// Zero-diffusion measurement: the axis tracks the Bloch vector
    /// (alpha = -theta in this crate's angle convention).
    pub fn aligned() -> Self {
        Self::linear(0.0, -1.0)
    }
}

/// Fitted parameters of the published protocol: c1 = -A - B(1 - exp(-r w/k)),
/// c0 switching from 0 to pi/2 at omega/k = switch_ratio. The residual mean m
/// and standard deviation sigma of the underlying fit are carried as
/// fit-quality metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedProtocol {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub switch_ratio: f64,
    pub gamma_table: f64,
    pub m: f64,
    pub sigma: f64,
}

pub const DEFAULT_SWITCH_RATIO: f64 = 45.0;

/// Fit-parameter table, one row per tabulated gamma (in units of k).
pub const PROTOCOL_TABLE: [PublishedProtocol; 3] = [
    PublishedProtocol {
        a: 0.500,
        b: 0.186,
        r: 0.476,
        switch_ratio: DEFAULT_SWITCH_RATIO,
        gamma_table: 0.1,
        m: 0.002,
        sigma: 0.007,
    },
    PublishedProtocol {
        a: 0.479,
        b: 0.211,
        r: 0.705,
        switch_ratio: DEFAULT_SWITCH_RATIO,
        gamma_table: 0.2,
        m: -0.005,
        sigma: 0.011,
    },
    PublishedProtocol {
        a: 0.478,
        b: 0.217,
        r: 0.529,
        switch_ratio: DEFAULT_SWITCH_RATIO,
        gamma_table: 0.3,
        m: 0.001,
        sigma: 0.008,
    },
];

impl PublishedProtocol {
    /// Table row for an exactly tabulated gamma. No interpolation: for other
    /// gamma the caller must supply fit parameters or run the optimizer.
    pub fn for_gamma(gamma: f64) -> Option<Self> {
        PROTOCOL_TABLE
            .iter()
            .find(|row| (row.gamma_table - gamma).abs() < 1e-12)
            .copied()
    }
}

/// Evaluate the angle law, wrapped to (-pi, pi].
pub fn measurement_angle(theta: f64, coeffs: &ProtocolCoefficients) -> f64 {
    let alpha = coeffs.c0 + theta * (coeffs.c1 + theta * (coeffs.c2 + theta * coeffs.c3));
    wrap_angle(alpha)
}

/// Coefficients of the published protocol at feedback speed omega.
///
/// c0 is returned unsigned (0 or pi/2); the side selection (the sign of c0
/// following sgn(theta)) happens at evaluation time in `ControlPolicy`.
pub fn published_coefficients(
    omega: f64,
    k: f64,
    proto: &PublishedProtocol,
) -> ProtocolCoefficients {
    debug_assert!(k > 0.0, "published protocol needs k > 0");
    let ratio = omega / k;
    let c0 = if ratio < proto.switch_ratio {
        0.0
    } else {
        FRAC_PI_2
    };
    let c1 = -proto.a - proto.b * (1.0 - (-proto.r * ratio).exp());
    ProtocolCoefficients::linear(c0, c1)
}

/// Signed feedback rotation speed mu = sgn(theta) min(omega, |theta|/dt).
///
/// The clamp prevents over-rotation past the target within one step; sgn(0)=0
/// so the rotation vanishes exactly at the target. The engine applies
/// H = hbar (mu/2) sigma_y with this signed mu, giving dtheta/dt = -mu.
pub fn feedback_rotation(theta: f64, omega: f64, dt: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    theta.signum() * omega.min(theta.abs() / dt)
}

/// A protocol as used by the engine: the angle law plus the side-selection
/// rule for the pi/2 branch of the published protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPolicy {
    pub coeffs: ProtocolCoefficients,
    /// When set, the constant term follows the side of the Bloch vector:
    /// alpha = sgn(theta) c0 + c1 theta + ..., with +c0 at theta = 0.
    pub fold_c0_sign: bool,
}

impl ControlPolicy {
    pub fn explicit(coeffs: ProtocolCoefficients) -> Self {
        Self {
            coeffs,
            fold_c0_sign: false,
        }
    }

    pub fn aligned() -> Self {
        Self::explicit(ProtocolCoefficients::aligned())
    }

    pub fn published(omega: f64, k: f64, proto: &PublishedProtocol) -> Self {
        Self {
            coeffs: published_coefficients(omega, k, proto),
            fold_c0_sign: true,
        }
    }

    /// Measurement angle for the current state angle.
    pub fn alpha(&self, theta: f64) -> f64 {
        if self.fold_c0_sign {
            let side = if theta < 0.0 { -1.0 } else { 1.0 };
            let c = ProtocolCoefficients {
                c0: side * self.coeffs.c0,
                ..self.coeffs
            };
            measurement_angle(theta, &c)
        } else {
            measurement_angle(theta, &self.coeffs)
        }
    }
}
