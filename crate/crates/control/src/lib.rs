//! Receding-horizon controllers for the integrated energy system: a
//! composite multi-rate economic MPC and a hierarchical real-time
//! optimization baseline, both built on a sequential optimal-control
//! backend.

pub mod cempc;
pub mod hrto;
pub mod minlp;
pub mod nlp;
pub mod ocp;
pub mod weights;

pub use nlp::{solve_nlp, solve_nlp_traced, IterateRecord, NlpSettings};
pub use ocp::{OcpProblem, OcpSolution, SolveStatus, SolverError};
pub use weights::{ControllerWeights, ZoneSpec};
