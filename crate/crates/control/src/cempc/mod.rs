//! The composite controller: hourly scheduling plus three interconnected
//! receding-horizon layers at slow, medium and fast rates.

pub mod coordinator;
pub mod fast;
pub mod longterm;
pub mod medium;
pub mod slow;

pub use coordinator::{AblationConfig, CempcCoordinator, CoordinatorConfig};
pub use fast::FastEmpc;
pub use longterm::{LongTermEmpc, LongTermResult, LongTermStage};
pub use medium::MediumEmpc;
pub use slow::SlowEmpc;

use ies_core::state::{Disturbance, IntegerInput};
use ies_core::decomposition::{N_FAST, N_MEDIUM};

use crate::ocp::SolveStatus;

/// Hourly layer exports: the binary schedule and capacity references.
#[derive(Debug, Clone, Copy)]
pub struct ScheduleReference {
    pub z: IntegerInput,
    /// Battery capacity reference for the end of the hour.
    pub c_soc_ref: f64,
    /// Tank capacity reference for the end of the hour.
    pub c_sot_ref: f64,
    /// Time the producing solve ran (s).
    pub produced_at: f64,
}

/// Slow-layer exports consumed by the medium layer.
#[derive(Debug, Clone, Copy)]
pub struct CascadeReference {
    pub u_s: [f64; 3],
    pub u_m: [f64; 1],
    pub u_f: [f64; 2],
    pub x_m: [f64; N_MEDIUM],
    pub x_f: [f64; N_FAST],
    pub produced_at: f64,
}

/// Medium-layer exports consumed by the fast layer.
#[derive(Debug, Clone, Copy)]
pub struct MediumReference {
    pub u_f: [f64; 2],
    pub x_f: [f64; N_FAST],
    pub produced_at: f64,
}

/// External signals as seen by the controllers.
pub trait ExogenousSource {
    /// Realized disturbance at `t` (the latest known block value).
    fn realized(&self, t: f64) -> Disturbance;
    /// Long-term forecast disturbance at `t`.
    fn forecast(&self, t: f64) -> Disturbance;
    /// Building temperature set-point at `t`.
    fn temperature_setpoint(&self, t: f64) -> f64;
}

/// One telemetry row per controller solve.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SolveTelemetry {
    pub t: f64,
    pub controller: &'static str,
    pub status: SolveStatus,
    pub iterations: usize,
    pub objective: f64,
    pub max_violation: f64,
    /// Wall time; excluded from deterministic artifacts.
    pub wall_time_s: f64,
    pub fallback: bool,
}
