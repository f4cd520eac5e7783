//! Lithium-ion battery bank, Thevenin equivalent model.

use crate::error::ModelError;
use crate::params::ModelParameters;

/// Algebraic outputs of the battery bank.
#[derive(Debug, Clone, Copy, Default)]
pub struct BatteryOutputs {
    /// Per-cell current (A).
    pub i_ba_cell: f64,
    /// Bank voltage (V).
    pub v_ba: f64,
    /// Current demanded by the power balance (A).
    pub i_ba_cal: f64,
    /// Bank electric power, positive when discharging (kW).
    pub p_ba: f64,
}

/// Right-hand side of the states `(v_cap, C_soc, I_ba)`.
///
/// `p_ba_d` is the power the bank must supply to close the electric balance.
pub fn battery_rhs(
    v_cap: f64,
    _c_soc: f64,
    i_ba: f64,
    p_ba_d: f64,
    p: &ModelParameters,
) -> Result<([f64; 3], BatteryOutputs), ModelError> {
    let i_ba_cell = i_ba / p.n_pb;
    let v_ba = p.n_sb * (p.E_m - v_cap - p.R_0b * i_ba_cell);
    if v_ba <= 0.0 {
        return Err(ModelError::domain(
            "battery",
            format!("bank voltage {v_ba:.3} V <= 0"),
        ));
    }
    let i_ba_cal = 1e3 * p_ba_d / v_ba;
    let p_ba = v_ba * i_ba / 1e3;

    let d_v_cap = i_ba_cell / p.C_1b - v_cap / (p.R_1b * p.C_1b);
    let d_c_soc = -i_ba_cell / (3600.0 * p.C_eb);
    let d_i_ba = (i_ba_cal - i_ba) / p.tau_dc;

    Ok((
        [d_v_cap, d_c_soc, d_i_ba],
        BatteryOutputs {
            i_ba_cell,
            v_ba,
            i_ba_cal,
            p_ba,
        },
    ))
}
