//! Solid oxide fuel cell benchmark model.

use crate::error::ModelError;
use crate::params::ModelParameters;

/// Algebraic outputs of the fuel cell.
#[derive(Debug, Clone, Copy, Default)]
pub struct FuelCellOutputs {
    /// Open-circuit potential (V).
    pub v_0: f64,
    /// Stack output voltage (V).
    pub v_fc: f64,
    /// Activation loss (V).
    pub eta_a: f64,
    /// Concentration loss (V).
    pub eta_c: f64,
    /// Ohmic loss (V).
    pub eta_o: f64,
    /// Outside (demand) current (A).
    pub i_fc: f64,
    /// Electric power (kW).
    pub p_fc: f64,
    /// Oxygen inflow (mol/s).
    pub g_o2: f64,
    /// Reacted hydrogen flow (mol/s).
    pub g_h2r: f64,
}

/// Right-hand side of the fuel-cell states `(I_f, G_H2, p_O2, p_H2O, p_H2)`.
///
/// With the unit switched off every derivative is zero and no voltage
/// algebra is evaluated, so any stored state is legal.
pub fn fuel_cell_rhs(
    i_f: f64,
    g_h2: f64,
    p_o2: f64,
    p_h2o: f64,
    p_h2: f64,
    g_ff: f64,
    z_fc: bool,
    p: &ModelParameters,
) -> Result<([f64; 5], FuelCellOutputs), ModelError> {
    if !z_fc {
        return Ok(([0.0; 5], FuelCellOutputs::default()));
    }
    if p_o2 <= 0.0 || p_h2o <= 0.0 || p_h2 <= 0.0 {
        return Err(ModelError::domain(
            "fuel_cell",
            format!("non-positive partial pressure (O2 {p_o2}, H2O {p_h2o}, H2 {p_h2})"),
        ));
    }
    if i_f <= 0.0 {
        return Err(ModelError::domain(
            "fuel_cell",
            format!("non-positive stack current I_f = {i_f}"),
        ));
    }
    if i_f >= p.I_L {
        return Err(ModelError::domain(
            "fuel_cell",
            format!("stack current I_f = {i_f} at or above limiting current {}", p.I_L),
        ));
    }

    let i_fc = g_h2 * p.fu_d / (2.0 * p.K_r);
    let g_o2 = g_h2 / p.r_H_O;
    let g_h2r = 2.0 * p.K_r * i_f;

    let d_i_f = (i_fc - i_f) / p.tau_e;
    let d_g_h2 = (p.M_ng * g_ff - g_h2) / p.tau_f;
    let d_p_o2 = ((g_o2 - i_f * p.K_r) / p.K_O2 - p_o2) / p.tau_O2;
    let d_p_h2o = (g_h2r / p.K_H2O - p_h2o) / p.tau_H2O;
    let d_p_h2 = ((g_h2 - g_h2r) / p.K_H2 - p_h2) / p.tau_H2;

    let thermal = p.R_0fc * p.T_0fc / (2.0 * p.F_0fc);
    let v_0 = p.N_0fc * (p.E_0fc + thermal * (p_h2 * p_o2.sqrt() / p_h2o).ln());
    let eta_a = p.a_fc + p.b_fc * i_f.ln();
    let eta_c = -thermal * (1.0 - i_f / p.I_L).ln();
    let eta_o = i_f * p.r_fc;
    let v_fc = v_0 - eta_a - eta_c - eta_o;
    let p_fc = v_fc * i_fc / 1e3;

    Ok((
        [d_i_f, d_g_h2, d_p_o2, d_p_h2o, d_p_h2],
        FuelCellOutputs {
            v_0,
            v_fc,
            eta_a,
            eta_c,
            eta_o,
            i_fc,
            p_fc,
            g_o2,
            g_h2r,
        },
    ))
}
