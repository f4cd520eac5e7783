//! Submodels of the seven operating units.
//!
//! Each unit exposes its right-hand side over the relevant state slice plus
//! the algebraic quantities it produces. The plant composes them in
//! dependency order.

pub mod battery;
pub mod chiller;
pub mod fuel_cell;
pub mod microturbine;
pub mod pipeline;
pub mod pv;
pub mod storage;

pub use battery::{battery_rhs, BatteryOutputs};
pub use chiller::{electric_chiller_rhs, ChillerOutputs};
pub use fuel_cell::{fuel_cell_rhs, FuelCellOutputs};
pub use microturbine::{microturbine_rhs, MicroturbineOutputs};
pub use pipeline::{chiller_return_temp, pipeline_and_building_rhs, pump_power, PipelineOutputs};
pub use pv::{pv_power, PvOutputs};
pub use storage::{storage_rhs, tank_taps, StorageOutputs, TankTaps};
