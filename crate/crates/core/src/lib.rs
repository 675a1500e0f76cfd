//! Monte Carlo engine and protocol toolkit for measurement-based feedback
//! control of a continuously monitored qubit coupled to a thermal bath.
//!
//! The state lives in the x-z plane of the Bloch ball, written either as a
//! vector (ax, az) or in polar form (a, theta) with theta measured from the
//! ground state. A weak continuous measurement along an adjustable axis
//! alpha(theta) = c0 + c1 theta + ... produces backaction that, for the right
//! coefficient choice, pushes the qubit toward the ground state faster than
//! the bath reheats it; a bang-bang Hamiltonian rotation at speed omega
//! drives theta back to zero. The crate simulates the conditioned dynamics
//! (`sme`), reduces them to polar SDEs and a theta^2 moment model (`polar`),
//! and optimizes or fits the protocol coefficients (`optimize`).

pub mod bloch;
pub mod ensemble;
pub mod error;
pub mod optimize;
pub mod params;
pub mod polar;
pub mod policy;
pub mod sme;

pub use bloch::{
    error_probability, from_polar, rotate_to_xz, thermal_equilibrium, to_polar, wrap_angle,
    BlochVector, PolarState,
};
pub use ensemble::{
    burn_in_heuristic, estimate_steady_error, paired_difference, trajectory_rng, EnsembleConfig,
    EnsembleEstimate, PairedDifference,
};
pub use error::{EngineError, OptimizeError, ParamsError, StateError};
pub use optimize::{
    fit_c1_curve, optimize_coefficients, sweep_switch_point, FitResult, OptimizeOptions,
    OptimizeResult, SweepPoint, SwitchSweep,
};
pub use params::SimParams;
pub use polar::{
    polar_coefficients, polar_step, theta2_moment_step, theta2_steady_state, PolarDrift, Scheme,
};
pub use policy::{
    feedback_rotation, measurement_angle, published_coefficients, ControlPolicy,
    ProtocolCoefficients, PublishedProtocol, DEFAULT_SWITCH_RATIO, PROTOCOL_TABLE,
};
pub use sme::{
    expectation_sigma_alpha, measurement_axis, simulate_trajectory, sme_step, StepNoise,
    StepResult, ThermalMode, TrajectoryConfig, TrajectoryPoint, TrajectorySummary,
};
