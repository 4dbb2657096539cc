//! Gradient blow-up machinery for the one-dimensional Lagrangian p-system
//! `τ_t − u_x = 0, u_t + p(τ, S(x))_x = 0` with a general pressure law.

pub mod eos;
pub mod error;
pub mod numerics;
pub mod params;
pub mod pipeline;
pub mod riccati;
pub mod solver;
pub mod thermo;
pub mod verify;

pub use error::{EosError, Error, NumericsError, RiccatiError, SolverError, ThermoError, VerifyError};
pub use params::{ParamMap, ParamValue};
