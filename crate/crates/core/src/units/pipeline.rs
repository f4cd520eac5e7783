//! Pipeline mixing, pump, fan coil units and the building envelope.

use crate::error::ModelError;
use crate::params::ModelParameters;

/// Flows below this magnitude are treated as no-flow for mixing purposes.
pub const FLOW_EPS: f64 = 1e-9;

/// Algebraic outputs of the pipeline, pump, fan coils and building.
#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineOutputs {
    /// Return water temperature on the chiller side (degC).
    pub t_rec: f64,
    /// Mixed chiller supply temperature (degC).
    pub t_slc: f64,
    /// Final supply water temperature (degC).
    pub t_sl: f64,
    /// Supply water flow to the customers (kg/s).
    pub g_sl: f64,
    /// Total pumped flow (kg/s).
    pub g_all: f64,
    /// Pump hydraulic head (m).
    pub h_pmp: f64,
    /// Pump efficiency.
    pub eta_pmp: f64,
    /// Pump electric power (kW).
    pub p_pmp: f64,
    /// Fan-coil cooling power (kW).
    pub q_fcu: f64,
    /// Computed return water temperature before the fan-coil lag (degC).
    pub t_re_cal: f64,
    /// Cooling power delivered to the customers (kW).
    pub q_sl: f64,
}

/// Return water temperature on the chiller side after the hot-tank branch.
///
/// With both chillers off and no tank flow the loop is stagnant and the
/// return temperature passes through unchanged.
pub fn chiller_return_temp(
    g_ab: f64,
    g_ec: f64,
    g_st: f64,
    t_re: f64,
    t_hp: f64,
) -> Result<f64, ModelError> {
    let g_ch = g_ab + g_ec;
    let g_sl = g_ch + g_st;
    if g_ch <= FLOW_EPS {
        if g_ab.abs() > FLOW_EPS || g_ec.abs() > FLOW_EPS || g_st.abs() > FLOW_EPS {
            return Err(ModelError::domain(
                "pipeline",
                format!("chiller flow {g_ch:.3e} cannot carry tank flow {g_st:.3e}"),
            ));
        }
        return Ok(t_re);
    }
    Ok((g_sl * t_re - g_st * t_hp) / g_ch)
}

/// Pump power for a total pumped flow (kg/s).
pub fn pump_power(g_all: f64, p: &ModelParameters) -> Result<(f64, f64, f64), ModelError> {
    if g_all <= FLOW_EPS {
        return Ok((0.0, 0.0, 0.0));
    }
    let h_pmp = p.S_pmp * g_all * g_all;
    let eta_pmp = p.b_pmp_1 * g_all * g_all + p.b_pmp_2 * g_all + p.b_pmp_3;
    if eta_pmp <= 0.0 {
        return Err(ModelError::domain(
            "pipeline",
            format!("pump efficiency {eta_pmp:.4} <= 0 at flow {g_all:.3}"),
        ));
    }
    Ok((g_all * p.g_e * h_pmp / (1e3 * eta_pmp), h_pmp, eta_pmp))
}

/// Right-hand side of the states `(t_re, t_br)` plus the pipeline algebra.
#[allow(clippy::too_many_arguments)]
pub fn pipeline_and_building_rhs(
    t_re: f64,
    t_br: f64,
    g_ab: f64,
    g_ec: f64,
    g_st: f64,
    g_stu: f64,
    t_ab: f64,
    t_ec: f64,
    t_cp: f64,
    t_hp: f64,
    t_a: f64,
    q_other: f64,
    p: &ModelParameters,
) -> Result<([f64; 2], PipelineOutputs), ModelError> {
    let g_ch = g_ab + g_ec;
    let g_sl = g_ch + g_st;
    let g_all = g_ch + g_stu;

    if g_sl < -FLOW_EPS {
        return Err(ModelError::domain(
            "pipeline",
            format!("negative supply flow G_sl = {g_sl:.4}"),
        ));
    }

    let t_rec = chiller_return_temp(g_ab, g_ec, g_st, t_re, t_hp)?;
    let t_slc = if g_ch > FLOW_EPS {
        (g_ab * t_ab + g_ec * t_ec) / g_ch
    } else {
        0.0
    };
    let no_supply = g_sl <= FLOW_EPS;
    let t_sl = if no_supply {
        t_re
    } else {
        (g_ab * t_ab + g_ec * t_ec + g_st * t_cp) / g_sl
    };

    let (p_pmp, h_pmp, eta_pmp) = pump_power(g_all, p)?;

    let q_fcu = if no_supply {
        0.0
    } else {
        p.Q_fcu_0 * (t_br - t_sl) / p.delta_t_wa_0 * (g_sl / p.G_sl_0).powf(0.6)
    };
    let t_re_cal = if no_supply {
        t_re
    } else {
        t_sl + q_fcu / (g_sl * p.C_w)
    };
    let q_sl = if no_supply {
        0.0
    } else {
        g_sl * p.C_w * (t_re - t_sl)
    };

    let d_t_re = (t_re_cal - t_re) / p.tau_fcu;
    let d_t_br = (p.U_br * (t_a - t_br) - q_sl + q_other) / p.C_br;

    Ok((
        [d_t_re, d_t_br],
        PipelineOutputs {
            t_rec,
            t_slc,
            t_sl,
            g_sl,
            g_all,
            h_pmp,
            eta_pmp,
            p_pmp,
            q_fcu,
            t_re_cal,
            q_sl,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_stream_mixing_passes_through() {
        let p = ModelParameters::default();
        let (_, out) = pipeline_and_building_rhs(
            12.0, 24.0, 3.5714, 0.0, 0.0, 0.0, 7.0, 0.0, 0.0, 12.0, 30.0, 20.0, &p,
        )
        .unwrap();
        assert_relative_eq!(out.t_sl, 7.0, epsilon = 1e-12);
        assert_relative_eq!(out.t_slc, 7.0, epsilon = 1e-12);
    }

    #[test]
    fn nominal_fan_coil_power() {
        let p = ModelParameters::default();
        // t_br - t_sl = 15 at the nominal supply flow gives the rated 125 kW.
        let (_, out) = pipeline_and_building_rhs(
            12.0, 22.0, 3.5714, 2.3806, 0.0, 0.0, 7.0, 7.0, 0.0, 12.0, 30.0, 20.0, &p,
        )
        .unwrap();
        assert_relative_eq!(out.g_sl, 5.952, epsilon = 1e-9);
        assert_relative_eq!(out.q_fcu, 125.0, epsilon = 1e-6);
    }

    #[test]
    fn building_equilibrium_balance() {
        let p = ModelParameters::default();
        let t_a = 30.0;
        let t_br = 24.0;
        let q_other = 20.0;
        // Choose supply conditions that deliver exactly the envelope load.
        let q_target = p.U_br * (t_a - t_br) + q_other;
        let g_sl = 5.952;
        let t_sl = 7.0;
        let t_re = t_sl + q_target / (g_sl * p.C_w);
        let (dx, out) = pipeline_and_building_rhs(
            t_re, t_br, 3.5714, 2.3806, 0.0, 0.0, t_sl, t_sl, 0.0, t_re, t_a, q_other, &p,
        )
        .unwrap();
        assert_relative_eq!(out.q_sl, q_target, epsilon = 1e-9);
        assert!(dx[1].abs() < 1e-15, "dt_br = {}", dx[1]);
    }

    #[test]
    fn pump_power_at_nominal_flow() {
        let p = ModelParameters::default();
        let (p_pmp, _, _) = pump_power(5.952, &p).unwrap();
        assert_relative_eq!(p_pmp, 13.840220442117587, epsilon = 1e-9);
    }

    #[test]
    fn stagnant_loop_is_legal_with_zero_flows() {
        let p = ModelParameters::default();
        let (dx, out) = pipeline_and_building_rhs(
            12.0, 24.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 12.0, 30.0, 20.0, &p,
        )
        .unwrap();
        assert_eq!(out.q_sl, 0.0);
        assert_eq!(out.q_fcu, 0.0);
        assert_eq!(dx[0], 0.0);
        assert!(dx[1] > 0.0, "building warms with no cooling");
    }

    #[test]
    fn tank_flow_without_chiller_flow_is_a_domain_error() {
        let p = ModelParameters::default();
        assert!(pipeline_and_building_rhs(
            12.0, 24.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 7.0, 12.0, 30.0, 20.0, &p,
        )
        .is_err());
    }
}
