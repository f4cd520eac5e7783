//! Simplified linear model for hourly scheduling.
//!
//! Unit powers reduce to linear gains around their nominal conditions; only
//! the storage capacities and the building temperature keep dynamics.

use crate::params::ModelParameters;
use crate::state::IntegerInput;

/// Number of long-term states: `C_soc, C_sot, t_br`.
pub const NX_L: usize = 3;
/// Number of long-term continuous inputs: `G_ff, G_fm, N_ec, G_stu, P_ba`.
pub const NU_L: usize = 5;

/// Long-term disturbance: ambient temperature, solar radiation, other load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongTermDisturbance {
    pub t_a: f64,
    pub s_ra: f64,
    pub q_other: f64,
}

/// Algebraic outputs of the linear model.
#[derive(Debug, Clone, Copy, Default)]
pub struct LongTermOutputs {
    pub p_pv: f64,
    pub p_fc: f64,
    pub p_mt: f64,
    pub q_ab: f64,
    pub q_ec: f64,
    pub p_cp: f64,
    pub q_st: f64,
    pub p_pmp: f64,
    /// Electric power supplied (kW).
    pub p_sl: f64,
    /// Cooling power supplied (kW).
    pub q_sl: f64,
    /// Signed tank flow (kg/s).
    pub g_st: f64,
    /// Total pumped flow (kg/s).
    pub g_all: f64,
}

/// Evaluates the simplified model: state derivative and outputs.
///
/// `x_l = [C_soc, C_sot, t_br]`, `u_l = [G_ff, G_fm, N_ec, G_stu, P_ba]`.
pub fn long_term_rhs(
    x_l: &[f64; NX_L],
    u_l: &[f64; NU_L],
    z: &IntegerInput,
    w: &LongTermDisturbance,
    p: &ModelParameters,
) -> ([f64; NX_L], LongTermOutputs) {
    let [_, _, t_br] = *x_l;
    let [g_ff, g_fm, n_ec, g_stu, p_ba] = *u_l;
    let zf = z.to_f64();

    let g_st = (2.0 * zf[3] - 1.0) * g_stu;
    let g_all = zf[1] * p.G_ab_0 + zf[2] * p.G_ec_0 + g_stu;

    let out = {
        let p_pv = p.k_pv * w.s_ra;
        let p_fc = p.k_fc * g_ff;
        let p_mt = p.k_mt * g_fm;
        let q_ab = p.k_ab * p_mt;
        let q_ec = p.k_ec * n_ec;
        let p_cp = p.k_cp * q_ec;
        let q_st = p.k_st * g_st;
        let p_pmp = p.k_pmp * g_all;
        let p_sl = p_pv + p_fc + p_mt + p_ba - p_cp - p_pmp;
        let q_sl = q_ab + q_ec + q_st;
        LongTermOutputs {
            p_pv,
            p_fc,
            p_mt,
            q_ab,
            q_ec,
            p_cp,
            q_st,
            p_pmp,
            p_sl,
            q_sl,
            g_st,
            g_all,
        }
    };

    let d_c_soc = p.k_ba * p_ba;
    let d_c_sot = -g_st / p.M_st;
    let d_t_br = (p.U_br * (w.t_a - t_br) - out.q_sl + w.q_other) / p.C_br;

    ([d_c_soc, d_c_sot, d_t_br], out)
}

/// Long-term input bounds by projection of the plant bounds; the battery
/// power window comes from the bank current limits at the 200 V rest
/// voltage.
pub fn long_term_input_bounds(
    bounds: &crate::state::OperatingBounds,
) -> ([f64; NU_L], [f64; NU_L]) {
    let v_nom = 0.2; // kW per A at the nominal bank voltage
    let lo = [
        bounds.u_min[0],
        bounds.u_min[1],
        bounds.u_min[3],
        bounds.u_min[5],
        bounds.x_min[17] * v_nom,
    ];
    let hi = [
        bounds.u_max[0],
        bounds.u_max[1],
        bounds.u_max[3],
        bounds.u_max[5],
        bounds.x_max[17] * v_nom,
    ];
    (lo, hi)
}

/// Long-term state bounds by projection of the plant bounds.
pub fn long_term_state_bounds(
    bounds: &crate::state::OperatingBounds,
) -> ([f64; NX_L], [f64; NX_L]) {
    (
        [bounds.x_min[16], bounds.x_min[18], bounds.x_min[22]],
        [bounds.x_max[16], bounds.x_max[18], bounds.x_max[22]],
    )
}
