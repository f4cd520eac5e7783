//! Photovoltaic generation at the maximum power point.

use crate::params::ModelParameters;

/// Algebraic outputs of the photovoltaic unit.
#[derive(Debug, Clone, Copy, Default)]
pub struct PvOutputs {
    /// Cell current at the maximum power point (A).
    pub i_pv_max: f64,
    /// Cell voltage at the maximum power point (V).
    pub v_pv_max: f64,
    /// Array electric power (kW).
    pub p_pv: f64,
}

/// Array power from ambient temperature (degC) and solar radiation (W/m^2).
///
/// Total function for `s_ra >= 0`; maximum power point tracking is assumed
/// ideal so current and voltage are algebraic in the weather.
pub fn pv_power(t_a: f64, s_ra: f64, p: &ModelParameters) -> PvOutputs {
    debug_assert!(s_ra >= 0.0);
    let i_pv_max = p.I_max_0 * (s_ra / p.S_ra_0) * (1.0 + p.c_pv_1 * (t_a - p.t_pv_0));
    let v_pv_max = p.V_max_0
        * (1.0 - p.c_pv_3 * (t_a - p.t_pv_0))
        * (std::f64::consts::E + p.c_pv_2 * (s_ra - p.S_ra_0)).ln();
    let p_pv = p.n_pp * p.n_sp * i_pv_max * v_pv_max / 1000.0;
    PvOutputs {
        i_pv_max,
        v_pv_max,
        p_pv,
    }
}
