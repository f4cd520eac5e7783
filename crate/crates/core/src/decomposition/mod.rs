//! Three-time-scale decomposition of the plant.
//!
//! The 23 states split into slow, medium and fast sets by their time
//! constants; the reduced-order models eliminate the faster sets through
//! algebraic equilibrium conditions.

mod elimination;
mod partition;
mod reduced;
mod timescale;

pub use elimination::Eliminator;
pub use partition::{
    embed, project_fast, project_medium, project_slow, InputPartition, FAST_STATES, MEDIUM_STATES,
    N_FAST, N_MEDIUM, N_SLOW, SLOW_STATES,
};
pub use reduced::{fast_rhs, medium_rhs, separation_eps, slow_rhs, FastRhs, MediumRhs, SlowRhs};
pub use timescale::{compute_time_scales, NominalOperatingPoint, TimeScalePartition};
