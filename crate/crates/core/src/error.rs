//! Error types shared by the plant model and the reduced-order models.

use thiserror::Error;

/// Errors raised by model evaluation, integration and equilibrium solving.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    /// An algebraic expression left its physical domain (log of a
    /// non-positive number, vanishing denominator, ...).
    #[error("domain error in {unit}: {what}")]
    Domain { unit: &'static str, what: String },

    /// A storage tank would underflow or overflow.
    #[error("capacity error in {unit}: {what}")]
    Capacity { unit: &'static str, what: String },

    /// Newton iteration failed to reach the residual tolerance.
    #[error("equilibrium solve did not converge: residual {residual:.3e} after {iterations} iterations")]
    Convergence { residual: f64, iterations: usize },

    /// A time outside the supported range was requested.
    #[error("time {t} s outside supported range {lo}..{hi} s")]
    Range { t: f64, lo: f64, hi: f64 },

    /// A parameter violated its positivity invariant.
    #[error("parameter {name} = {value} violates its invariant")]
    InvalidParameter { name: String, value: f64 },

    /// Configuration or file input problem.
    #[error("config error: {0}")]
    Config(String),
}

impl ModelError {
    pub fn domain(unit: &'static str, what: impl Into<String>) -> Self {
        Self::Domain {
            unit,
            what: what.into(),
        }
    }

    pub fn capacity(unit: &'static str, what: impl Into<String>) -> Self {
        Self::Capacity {
            unit,
            what: what.into(),
        }
    }
}
