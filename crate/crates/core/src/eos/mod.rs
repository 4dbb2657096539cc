//! Equation-of-state contract: pressure laws, entropy profiles and the
//! structural hypothesis checker.

pub mod hypotheses;
pub mod law;
pub mod profile;

pub use hypotheses::{
    check_h1, check_h2, check_h3, check_h4, derivative_consistency, ConditionRecord,
    HypothesisReport, StateBox, Verdict,
};
pub use law::{
    builtin, DeclaredConstants, GammaLaw, HTail, Partials, PressureFunction, PressureLaw,
    Stiffened,
};
pub use profile::{EntropyProfile, MonotoneSegment, ProfileShape};
