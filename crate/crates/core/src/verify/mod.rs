//! Numerical certification of the pressure sandwich, the `L∞` constant
//! cascade, the derived state bounds, and runtime monitors.

mod bounds;
mod monitor;
mod sandwich;

pub use bounds::{bound_constants, tau_min_bound, tau_min_over, BoundConstants, BoundInputs, TauBounds, TAU_SEARCH_FLOOR};
pub use monitor::{
    manifest_names, monitor_run, MonitorInputs, MonitorKind, MonitorLog, MonitorSeries, MONITOR_MANIFEST,
    MONITOR_SLACK,
};
pub use sandwich::{check_pressure_sandwich, SandwichReport, CH_SLACK};
