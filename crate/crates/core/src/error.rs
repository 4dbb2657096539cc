use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("integrand or function not finite at {at}")]
    NonFinite { at: f64 },
    #[error("adaptive quadrature on [{a}, {b}] stalled with error estimate {error:e}")]
    QuadratureStalled { a: f64, b: f64, error: f64 },
    #[error("tail integral from {from} failed to converge (partial sum {partial})")]
    TailDivergent { from: f64, partial: f64 },
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EosError {
    #[error("pressure law `{law}` is not finite at tau={tau}, S={entropy} ({quantity})")]
    Evaluation {
        law: String,
        tau: f64,
        entropy: f64,
        quantity: &'static str,
    },
    #[error("unknown pressure law `{0}`")]
    UnknownLaw(String),
    #[error("unknown entropy profile `{0}`")]
    UnknownProfile(String),
    #[error("`{owner}` is missing required parameter `{key}`")]
    MissingParameter { owner: String, key: String },
    #[error("parameter `{key}` of `{owner}`: {reason}")]
    InvalidParameter {
        owner: String,
        key: String,
        reason: String,
    },
    #[error("invalid sampling box: {0}")]
    InvalidBox(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("p_tau = {p_tau} is not negative at tau={tau}, x={x}; sound speed undefined")]
    Domain { tau: f64, x: f64, p_tau: f64 },
    #[error("{quantity} at tau={tau}, x={x} did not converge: {source}")]
    Integral {
        quantity: &'static str,
        tau: f64,
        x: f64,
        #[source]
        source: NumericsError,
    },
    #[error(transparent)]
    Eos(#[from] EosError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiccatiError {
    #[error("a2 = {a2} is not positive at tau={tau}, x={x}")]
    NonPositiveA2 { a2: f64, tau: f64, x: f64 },
    #[error("discriminant {0:e} is negative; no real roots")]
    NegativeDiscriminant(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("time step {dt:e} exceeds CFL limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },
    #[error("specific volume {tau:e} fell below floor {floor:e} at x={x}, t={t}")]
    TauFloor { t: f64, x: f64, tau: f64, floor: f64 },
    #[error("non-finite state at x={x}, t={t}")]
    NonFinite { t: f64, x: f64 },
    #[error("invalid initial data: {0}")]
    InitialData(String),
    #[error("seed x={x} lies outside the domain [{left}, {right}]")]
    SeedOutsideDomain { x: f64, left: f64, right: f64 },
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Riccati(#[from] RiccatiError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("p > c·h at tau={tau}, x={x} (p={p}, c·h={ch}); the pressure law or h quadrature is inconsistent")]
    PressureExceedsCh { tau: f64, x: f64, p: f64, ch: f64 },
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Riccati(#[from] RiccatiError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Crate-wide error, used by the end-to-end pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Eos(#[from] EosError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Riccati(#[from] RiccatiError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
