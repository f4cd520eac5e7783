//! Plant model, time-scale decomposition, scenarios and performance metrics
//! for a stand-alone integrated energy system that supplies electricity and
//! cooling from gas, solar and storage units.

pub mod decomposition;
pub mod error;
pub mod integrator;
pub mod longterm;
pub mod metrics;
pub mod params;
pub mod plant;
pub mod scenario;
pub mod state;
pub mod units;

pub use error::ModelError;
pub use integrator::{PlantIntegrator, Trajectory, TrajectoryPoint};
pub use params::ModelParameters;
pub use plant::{plant_rhs, AlgebraicRecord, PlantOutputs};
pub use state::{
    ContinuousInput, Disturbance, IntegerInput, OperatingBounds, PlantState, NU, NX, NZ,
};
