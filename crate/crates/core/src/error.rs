use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("state not in the xz-plane: ay = {ay:e} exceeds tolerance")]
    OutOfPlane { ay: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("{field} must be {requirement}, got {value}")]
    Invalid {
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("dt too large for the fastest rate: dt*max(k, gamma*(nT+1), omega) = {product:.3e} exceeds 0.1")]
    StepTooLarge { product: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(
        "non-finite state after step at t={t}: (ax={ax:e}, az={az:e}); inputs alpha={alpha}, mu={mu}, dw={dw:e}"
    )]
    NonFinite {
        t: f64,
        ax: f64,
        az: f64,
        alpha: f64,
        mu: f64,
        dw: f64,
    },
    #[error("reduced polar model is singular at a = {a:e} (requires a > 1e-6)")]
    PolarSingular { a: f64 },
    #[error("averaging window too short: t_avg = {t_avg} < 10*dt = {min}")]
    WindowTooShort { t_avg: f64, min: f64 },
    #[error("ensemble needs at least one trajectory")]
    EmptyEnsemble,
    #[error("trajectory {index} (seed {seed}) failed: {source}")]
    Trajectory {
        index: u64,
        seed: u64,
        #[source]
        source: Box<EngineError>,
    },
    #[error("theta2 must be non-negative, got {value}")]
    NegativeTheta2 { value: f64 },
    #[error("theta2 steady state unstable: gamma - 8k c1(c1+1) = {denominator:e} <= 0")]
    Theta2Unstable { denominator: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error("optimizer budget must allow at least 20 objective evaluations, got {budget}")]
    BudgetTooSmall { budget: usize },
    #[error("no crossing of the two protocol branches inside the omega grid")]
    NoCrossing,
    #[error("fit requires at least 4 points, got {n}")]
    TooFewPoints { n: usize },
    #[error("fit failed: {reason}")]
    FitFailed { reason: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}
