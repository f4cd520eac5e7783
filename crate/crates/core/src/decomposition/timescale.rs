//! Per-state time constants and the dimensionless separation parameters.

use serde::{Deserialize, Serialize};

use crate::decomposition::partition::{FAST_STATES, MEDIUM_STATES, SLOW_STATES};
use crate::error::ModelError;
use crate::params::ModelParameters;
use crate::state::NX;

/// Available-capacity factor of the battery in the residence-time estimate.
pub const BETA_BA: f64 = 0.8;
/// Available-capacity factor of the cold tank in the residence-time estimate.
pub const BETA_ST: f64 = 0.9;

/// Load-dependent quantities needed by the residence-time estimates.
///
/// The defaults describe a high-load operating point: 32 A per battery cell
/// and 1 kg/s tank flow, both near their rated maxima.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NominalOperatingPoint {
    /// Per-cell battery current (A).
    pub i_ba_cell: f64,
    /// Tank water flow magnitude (kg/s).
    pub g_st: f64,
}

impl Default for NominalOperatingPoint {
    fn default() -> Self {
        Self {
            i_ba_cell: 32.0,
            g_st: 1.0,
        }
    }
}

/// The computed time-scale analysis: per-state constants, the three index
/// sets and the separation parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeScalePartition {
    /// Approximate time constant or residence time per state (s).
    pub tau_x: [f64; NX],
    pub slow_set: Vec<usize>,
    pub medium_set: Vec<usize>,
    pub fast_set: Vec<usize>,
    /// Representative state indices (zero-based) for slow, medium, fast.
    pub representatives: [usize; 3],
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
}

impl TimeScalePartition {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Smallest slow constant, largest medium and fast constants.
    pub fn separation_margins(&self) -> (f64, f64, f64) {
        let min_slow = self
            .slow_set
            .iter()
            .map(|&i| self.tau_x[i])
            .fold(f64::INFINITY, f64::min);
        let max_medium = self
            .medium_set
            .iter()
            .map(|&i| self.tau_x[i])
            .fold(0.0, f64::max);
        let max_fast = self
            .fast_set
            .iter()
            .map(|&i| self.tau_x[i])
            .fold(0.0, f64::max);
        (min_slow, max_medium, max_fast)
    }
}

/// Computes all 23 time constants, the fixed three-way split and the
/// separation parameters.
pub fn compute_time_scales(
    p: &ModelParameters,
    nominal: &NominalOperatingPoint,
) -> Result<TimeScalePartition, ModelError> {
    if nominal.i_ba_cell == 0.0 {
        return Err(ModelError::domain(
            "timescale",
            "nominal battery cell current is zero; the battery residence time is undefined",
        ));
    }
    if nominal.g_st == 0.0 {
        return Err(ModelError::domain(
            "timescale",
            "nominal tank flow is zero; the tank residence times are undefined",
        ));
    }

    let mut tau = [0.0; NX];
    tau[0] = p.tau_e;
    tau[1] = p.tau_f;
    tau[2] = p.tau_O2;
    tau[3] = p.tau_H2O;
    tau[4] = p.tau_H2;
    tau[5] = p.tau_mtf;
    tau[6] = p.tau_abf;
    tau[7] = p.tau_abw;
    tau[8] = p.tau_abt;
    tau[9] = p.C_cr * p.M_cr / (p.alpha_r * p.A_ci);
    tau[10] = p.C_s * p.M_cs / (p.alpha_r * p.A_ci + p.alpha_w * p.A_co);
    tau[11] = p.C_w * p.M_cw / (p.alpha_w * p.A_co);
    tau[12] = p.C_er * p.M_er / (p.alpha_r * p.A_ei);
    tau[13] = p.C_s * p.M_es / (p.alpha_r * p.A_ei + p.alpha_w * p.A_eo);
    tau[14] = p.C_w * p.M_ew / (p.alpha_w * p.A_eo);
    tau[15] = p.R_1b * p.C_1b;
    tau[16] = 3600.0 * p.C_eb * BETA_BA / nominal.i_ba_cell.abs();
    tau[17] = p.tau_dc;
    let tau_tank = p.M_st * BETA_ST / nominal.g_st.abs();
    tau[18] = tau_tank;
    tau[19] = tau_tank;
    tau[20] = tau_tank;
    tau[21] = p.tau_fcu;
    tau[22] = p.C_br / p.U_br;

    // Representatives: building temperature, absorption-chiller return
    // effect, fuel reforming lag.
    let representatives = [22usize, 8, 1];
    let eps1 = tau[1] / tau[22];
    let eps2 = tau[8] / tau[22];
    let eps3 = eps1 / eps2;

    Ok(TimeScalePartition {
        tau_x: tau,
        slow_set: SLOW_STATES.to_vec(),
        medium_set: MEDIUM_STATES.to_vec(),
        fast_set: FAST_STATES.to_vec(),
        representatives,
        eps1,
        eps2,
        eps3,
    })
}
