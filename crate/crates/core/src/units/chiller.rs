//! Vapor-compression electric chiller.
//!
//! Refrigerant enthalpy differences across the evaporator and condenser are
//! modeled as the constant latent-heat drops `delta_h_e` and `delta_h_c`;
//! the condenser water outlet follows the same mean-temperature convention
//! as the evaporator side, `t_cwo = 2 t_cwm - t_cwi`.

use crate::error::ModelError;
use crate::params::ModelParameters;

/// Algebraic outputs of the electric chiller.
#[derive(Debug, Clone, Copy, Default)]
pub struct ChillerOutputs {
    /// Refrigerant mass flow (kg/s).
    pub g_r: f64,
    /// Condensing pressure (MPa).
    pub p_c: f64,
    /// Evaporating pressure (MPa).
    pub p_e: f64,
    /// Pressure ratio.
    pub p_r: f64,
    /// Volumetric efficiency.
    pub eta_vl: f64,
    /// Specific compression work (kJ/kg).
    pub w_i: f64,
    /// Compressor efficiency.
    pub eta_cp: f64,
    /// Compressor electric power (kW).
    pub p_cp: f64,
    /// Supply chilled water temperature (degC).
    pub t_ec: f64,
    /// Cooling power (kW).
    pub q_ec: f64,
}

/// Saturation pressure (MPa) of the refrigerant at temperature `t` (degC).
pub fn saturation_pressure(t: f64) -> f64 {
    (21.3 - 2025.5 / (248.94 + t)).exp() / 1e6
}

/// Right-hand side of the states `(t_c, t_cs, t_cwm, t_e, t_es, t_ewm)`.
pub fn electric_chiller_rhs(
    t_c: f64,
    t_cs: f64,
    t_cwm: f64,
    t_e: f64,
    t_es: f64,
    t_ewm: f64,
    n_ec: f64,
    g_ec: f64,
    t_rec: f64,
    z_ec: bool,
    p: &ModelParameters,
) -> Result<([f64; 6], ChillerOutputs), ModelError> {
    if !z_ec {
        return Ok(([0.0; 6], ChillerOutputs::default()));
    }

    let p_c = saturation_pressure(t_c);
    let p_e = saturation_pressure(t_e);
    let p_r = p_c / p_e;
    if p_r <= 1.0 {
        return Err(ModelError::domain(
            "electric_chiller",
            format!("pressure ratio {p_r:.4} <= 1 (t_c = {t_c}, t_e = {t_e})"),
        ));
    }
    let eta_vl = 0.98 - 0.085 * (p_r.powf(1.0 / p.k_r) - 1.0);
    let g_r = eta_vl * n_ec * p.rho_eg * p.V_cp;
    let w_i =
        p.k_r / (1e3 * (p.k_r - 1.0)) * (1e6 * p_e / p.rho_eg) * (p_r.powf((p.k_r - 1.0) / p.k_r) - 1.0);
    let eta_cp = 0.9085 * (-0.06443 * p_r).exp() - 7.605 * (-3.155 * p_r).exp();
    if eta_cp <= 0.0 {
        return Err(ModelError::domain(
            "electric_chiller",
            format!("compressor efficiency {eta_cp:.4} <= 0 at pressure ratio {p_r:.4}"),
        ));
    }
    let p_cp = g_r * w_i / eta_cp;

    let t_ec = 2.0 * t_ewm - t_rec;
    let q_ec = g_ec * p.C_w * (t_rec - t_ec);
    let t_cwo = 2.0 * t_cwm - p.t_cwi;

    let d_t_e = (-g_r * p.delta_h_e + p.alpha_r * p.A_ei * (t_es - t_e)) / (p.C_er * p.M_er);
    let d_t_es =
        (p.alpha_r * p.A_ei * (t_e - t_es) + p.alpha_w * p.A_eo * (t_ewm - t_es)) / (p.C_s * p.M_es);
    let d_t_ewm = (p.C_w * g_ec * (t_rec - t_ec) + p.alpha_w * p.A_eo * (t_es - t_ewm))
        / (p.C_w * p.M_ew);
    let d_t_c = (g_r * p.delta_h_c + p.alpha_r * p.A_ci * (t_cs - t_c)) / (p.C_cr * p.M_cr);
    let d_t_cs =
        (p.alpha_r * p.A_ci * (t_c - t_cs) + p.alpha_w * p.A_co * (t_cwm - t_cs)) / (p.C_s * p.M_cs);
    let d_t_cwm = (p.C_w * p.G_cw * (p.t_cwi - t_cwo) + p.alpha_w * p.A_co * (t_cs - t_cwm))
        / (p.C_w * p.M_cw);

    Ok((
        [d_t_c, d_t_cs, d_t_cwm, d_t_e, d_t_es, d_t_ewm],
        ChillerOutputs {
            g_r,
            p_c,
            p_e,
            p_r,
            eta_vl,
            w_i,
            eta_cp,
            p_cp,
            t_ec,
            q_ec,
        },
    ))
}
