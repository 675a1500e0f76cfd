//! Qubit state representations and the error functional.
//!
//! States live in the xz-plane of the Bloch sphere. The target (ground) state
//! sits at (0, 0, -1); the polar angle theta is measured from it, so that
//! theta = atan2(ax, -az) and theta = 0 is the target.

use crate::error::StateError;

pub const XZ_PLANE_TOL: f64 = 1e-9;

/// Full 3-component Bloch vector a, with rho = (I + a.sigma)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl BlochVector {
    pub fn new(ax: f64, ay: f64, az: f64) -> Self {
        Self { ax, ay, az }
    }

    pub fn norm(&self) -> f64 {
        (self.ax * self.ax + self.ay * self.ay + self.az * self.az).sqrt()
    }
}

/// Reduced (a, theta) state: Bloch-vector length a in [0,1] and signed angle
/// theta in (-pi, pi] from the ground-state axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarState {
    pub a: f64,
    pub theta: f64,
}

impl PolarState {
    pub fn new(a: f64, theta: f64) -> Self {
        Self { a, theta }
    }
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    let pi = std::f64::consts::PI;
    if x > -pi && x <= pi {
        return x;
    }
    let mut t = x.rem_euclid(2.0 * pi);
    if t > pi {
        t -= 2.0 * pi;
    }
    t
}

/// Convert an xz-plane Bloch vector to polar form.
///
/// theta = atan2(ax, -az); for a = 0 the angle is defined as 0.
/// Rejects vectors out of the xz-plane (|ay| beyond 1e-9).
pub fn to_polar(b: BlochVector) -> Result<PolarState, StateError> {
    if b.ay.abs() > XZ_PLANE_TOL {
        return Err(StateError::OutOfPlane { ay: b.ay });
    }
    let a = (b.ax * b.ax + b.az * b.az).sqrt();
    let theta = if a == 0.0 { 0.0 } else { b.ax.atan2(-b.az) };
    Ok(PolarState { a, theta })
}

/// Inverse of `to_polar`: (a sin(theta), 0, -a cos(theta)).
pub fn from_polar(p: PolarState) -> BlochVector {
    BlochVector {
        ax: p.a * p.theta.sin(),
        ay: 0.0,
        az: -p.a * p.theta.cos(),
    }
}

/// Rotate about the z-axis back into the xz-plane: (sqrt(ax^2+ay^2), 0, az).
///
/// Preserves |b| and az exactly. The sign of the in-plane component is carried
/// by the theta bookkeeping of the caller, not by this function.
pub fn rotate_to_xz(b: BlochVector) -> BlochVector {
    BlochVector {
        ax: (b.ax * b.ax + b.ay * b.ay).sqrt(),
        ay: 0.0,
        az: b.az,
    }
}

/// Error probability eps = 1 - (1 + a cos(theta))/2, the population missing
/// from the target state.
pub fn error_probability(p: PolarState) -> f64 {
    1.0 - (1.0 + p.a * p.theta.cos()) / 2.0
}

/// Thermal equilibrium state: theta = 0, a = 1/(1+2nT).
///
/// The excited-state population at equilibrium is nT/(1+2nT), so
/// error_probability of this state is exactly that.
pub fn thermal_equilibrium(n_t: f64) -> PolarState {
    PolarState {
        a: 1.0 / (1.0 + 2.0 * n_t),
        theta: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    #[test]
    fn to_polar_ground_state() {
        let p = to_polar(BlochVector::new(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(p.a, 1.0);
        assert_eq!(p.theta, 0.0);
    }

    #[test]
    fn to_polar_equatorial() {
        let p = to_polar(BlochVector::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(p.a, 1.0);
        assert!(close(p.theta, std::f64::consts::FRAC_PI_2, 1e-15));
    }

    #[test]
    fn to_polar_direct_substitution() {
        let b = BlochVector::new(0.5 * 0.2f64.sin(), 0.0, -0.5 * 0.2f64.cos());
        let p = to_polar(b).unwrap();
        assert!(close(p.a, 0.5, 1e-15));
        assert!(close(p.theta, 0.2, 1e-15));
    }

    #[test]
    fn to_polar_rejects_out_of_plane() {
        assert!(to_polar(BlochVector::new(0.1, 0.5, -0.1)).is_err());
    }

    #[test]
    fn from_polar_ground_and_mixed() {
        let b = from_polar(PolarState::new(1.0, 0.0));
        assert_eq!((b.ax, b.ay, b.az), (0.0, 0.0, -1.0));
        let b = from_polar(PolarState::new(0.0, 1.234));
        assert_eq!((b.ax, b.ay, b.az), (0.0, 0.0, -0.0));
    }

    #[test]
    fn from_polar_thermal_row() {
        let b = from_polar(PolarState::new(5.0 / 6.0, 0.0));
        assert!(close(b.az, -5.0 / 6.0, 1e-15));
        assert_eq!(b.ax, 0.0);
    }

    #[test]
    fn rotate_to_xz_345() {
        let b = rotate_to_xz(BlochVector::new(0.3, 0.4, -0.5));
        assert!(close(b.ax, 0.5, 1e-15));
        assert_eq!(b.ay, 0.0);
        assert_eq!(b.az, -0.5);
    }

    #[test]
    fn rotate_to_xz_identity_on_xz() {
        let b = rotate_to_xz(BlochVector::new(0.0, 0.0, -1.0));
        assert_eq!((b.ax, b.ay, b.az), (0.0, 0.0, -1.0));
    }

    #[test]
    fn rotate_to_xz_in_plane_norm() {
        let b = rotate_to_xz(BlochVector::new(-0.6, 0.8, 0.0));
        assert!(close(b.ax, 1.0, 1e-15));
        assert_eq!(b.az, 0.0);
    }

    #[test]
    fn error_probability_values() {
        assert_eq!(error_probability(PolarState::new(1.0, 0.0)), 0.0);
        assert_eq!(error_probability(PolarState::new(0.0, 0.0)), 0.5);
        assert!(close(
            error_probability(PolarState::new(0.9, 0.0)),
            0.05,
            1e-15
        ));
    }

    #[test]
    fn error_probability_small_angle() {
        let exact = error_probability(PolarState::new(1.0, 0.1));
        assert!(close(exact, 0.0024979, 1e-6));
        let expansion = 0.0 / 2.0 + 1.0 * 0.1f64.powi(2) / 4.0;
        assert!((exact - expansion).abs() < 1e-5);
    }

    #[test]
    fn thermal_equilibrium_limits() {
        let p = thermal_equilibrium(0.0);
        assert_eq!((p.a, p.theta), (1.0, 0.0));
        assert!(thermal_equilibrium(1e12).a < 1e-11);
        let p = thermal_equilibrium(0.1);
        assert!(close(p.a, 5.0 / 6.0, 1e-15));
        assert!(close(error_probability(p), 1.0 / 12.0, 1e-15));
    }

    #[test]
    fn wrap_angle_range() {
        assert!(close(
            wrap_angle(3.0 * std::f64::consts::PI),
            std::f64::consts::PI,
            1e-12
        ));
        assert!(close(
            wrap_angle(-std::f64::consts::PI),
            std::f64::consts::PI,
            1e-12
        ));
        assert!(close(wrap_angle(0.3), 0.3, 1e-15));
        assert!(close(wrap_angle(-0.3), -0.3, 1e-15));
    }
}
