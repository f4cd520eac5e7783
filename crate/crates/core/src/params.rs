//! Physical parameters of the plant.
//!
//! One flat struct holding every constant of the seven operating units plus
//! the linear long-term gains. Values load/save as flat JSON keyed by the
//! transliterated symbol names (e.g. `"tau_abw": 80.0`).

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// All physical constants of the plant and the linearized long-term gains.
///
/// Field names transliterate the symbol names used throughout the model
/// equations; units are noted per field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ModelParameters {
    // Photovoltaic unit
    /// Photovoltaic cells in parallel.
    pub n_pp: f64,
    /// Photovoltaic cells in series.
    pub n_sp: f64,
    /// Current temperature coefficient (1/degC).
    pub c_pv_1: f64,
    /// Voltage irradiance coefficient (1/(W/m^2)).
    pub c_pv_2: f64,
    /// Voltage temperature coefficient (1/degC).
    pub c_pv_3: f64,
    /// Cell current at maximum power, nominal conditions (A).
    pub I_max_0: f64,
    /// Cell voltage at maximum power, nominal conditions (V).
    pub V_max_0: f64,
    /// Nominal solar radiation (W/m^2).
    pub S_ra_0: f64,
    /// Nominal ambient temperature (degC).
    pub t_pv_0: f64,

    // Fuel cell
    /// Current regulation time constant (s).
    pub tau_e: f64,
    /// Fuel reforming time constant (s).
    pub tau_f: f64,
    /// Oxygen pressure time constant (s).
    pub tau_O2: f64,
    /// Vapor pressure time constant (s).
    pub tau_H2O: f64,
    /// Hydrogen pressure time constant (s).
    pub tau_H2: f64,
    /// Oxygen valve constant (mol/(atm*s)).
    pub K_O2: f64,
    /// Vapor valve constant (mol/(atm*s)).
    pub K_H2O: f64,
    /// Hydrogen valve constant (mol/(atm*s)).
    pub K_H2: f64,
    /// Ohmic loss resistance (ohm).
    pub r_fc: f64,
    /// Activation loss offset.
    pub a_fc: f64,
    /// Activation loss slope.
    pub b_fc: f64,
    /// Universal gas constant (J/(mol*K)).
    pub R_0fc: f64,
    /// Stack temperature (K).
    pub T_0fc: f64,
    /// Faraday constant (C/mol).
    pub F_0fc: f64,
    /// Concentration-loss limiting current (A).
    pub I_L: f64,
    /// Electrochemical rate constant (mol/(A*s)).
    pub K_r: f64,
    /// Cells in the stack.
    pub N_0fc: f64,
    /// Ideal cell potential (V).
    pub E_0fc: f64,
    /// Hydrogen to oxygen flow ratio.
    pub r_H_O: f64,
    /// Natural-gas molar conversion factor (1/(kg/mol)).
    pub M_ng: f64,
    /// Desired fuel utilization.
    pub fu_d: f64,

    // Microturbine with absorption chiller
    /// Nominal microturbine power (kW).
    pub P_mt_0: f64,
    /// Nominal absorption-chiller supply temperature (degC).
    pub t_ab_0: f64,
    /// Power lag time constant (s).
    pub tau_mtf: f64,
    /// Flue-gas temperature effect time constant (s).
    pub tau_abf: f64,
    /// Water-flow temperature effect time constant (s).
    pub tau_abw: f64,
    /// Return-temperature effect time constant (s).
    pub tau_abt: f64,
    pub k_ma_1: f64,
    pub k_ma_2: f64,
    pub k_ma_3: f64,
    pub k_ma_4: f64,
    pub k_ma_5: f64,
    pub k_ma_6: f64,
    pub k_ma_7: f64,
    pub k_ma_8: f64,

    // Electric chiller
    /// Inside condenser area (m^2).
    pub A_ci: f64,
    /// Outside condenser area (m^2).
    pub A_co: f64,
    /// Inside evaporator area (m^2).
    pub A_ei: f64,
    /// Outside evaporator area (m^2).
    pub A_eo: f64,
    /// Refrigerant-shell heat transfer coefficient (kW/(m^2*degC)).
    pub alpha_r: f64,
    /// Water-shell heat transfer coefficient (kW/(m^2*degC)).
    pub alpha_w: f64,
    /// Refrigerant heat capacity, condenser side (kJ/(kg*degC)).
    pub C_cr: f64,
    /// Refrigerant heat capacity, evaporator side (kJ/(kg*degC)).
    pub C_er: f64,
    /// Shell heat capacity (kJ/(kg*degC)).
    pub C_s: f64,
    /// Water specific heat capacity (kJ/(kg*degC)).
    pub C_w: f64,
    /// Adiabatic index of the refrigerant.
    pub k_r: f64,
    /// Refrigerant mass, condenser (kg).
    pub M_cr: f64,
    /// Condenser shell mass (kg).
    pub M_cs: f64,
    /// Cooling water mass, condenser (kg).
    pub M_cw: f64,
    /// Refrigerant mass, evaporator (kg).
    pub M_er: f64,
    /// Evaporator shell mass (kg).
    pub M_es: f64,
    /// Chilled water mass, evaporator (kg).
    pub M_ew: f64,
    /// Refrigerant gas density (kg/m^3).
    pub rho_eg: f64,
    /// Compressor displacement volume (m^3).
    pub V_cp: f64,
    /// Cooling water flow rate (kg/s).
    pub G_cw: f64,
    /// Cooling water inlet temperature (degC).
    pub t_cwi: f64,
    /// Evaporator refrigerant enthalpy difference, inlet minus outlet magnitude (kJ/kg).
    pub delta_h_e: f64,
    /// Condenser refrigerant enthalpy difference, inlet minus outlet magnitude (kJ/kg).
    pub delta_h_c: f64,

    // Battery bank
    /// Cell electric potential (V).
    pub E_m: f64,
    /// Cell series resistance (ohm).
    pub R_1b: f64,
    /// Cell parallel resistance (ohm).
    pub R_0b: f64,
    /// Cell capacitance (F).
    pub C_1b: f64,
    /// Battery cells in parallel.
    pub n_pb: f64,
    /// Battery cells in series.
    pub n_sb: f64,
    /// Cell charge capacity (Ah).
    pub C_eb: f64,
    /// Current regulation time constant (s).
    pub tau_dc: f64,

    // Chilled water storage
    /// Tank mass capacity (kg).
    pub M_st: f64,

    // Pump and pipeline
    /// Pipeline resistance coefficient ((m*s^2)/kg^2).
    pub S_pmp: f64,
    pub b_pmp_1: f64,
    pub b_pmp_2: f64,
    pub b_pmp_3: f64,
    /// Gravitational acceleration (m/s^2).
    pub g_e: f64,

    // Fan coil units and building
    /// Nominal fan-coil cooling power (kW).
    pub Q_fcu_0: f64,
    /// Nominal air-water temperature difference (degC).
    pub delta_t_wa_0: f64,
    /// Nominal supply water flow rate (kg/s).
    pub G_sl_0: f64,
    /// Fan-coil thermal inertia time constant (s).
    pub tau_fcu: f64,
    /// Building heat capacity (kJ/degC).
    pub C_br: f64,
    /// Scaled building heat transfer coefficient (kW/degC).
    pub U_br: f64,

    // Linearized long-term gains
    pub k_fc: f64,
    pub k_mt: f64,
    pub k_ab: f64,
    pub k_ec: f64,
    pub k_cp: f64,
    pub k_st: f64,
    pub k_pmp: f64,
    pub k_ba: f64,
    pub k_pv: f64,
    /// Nominal absorption-chiller water flow (kg/s).
    pub G_ab_0: f64,
    /// Nominal electric-chiller water flow (kg/s).
    pub G_ec_0: f64,
}

impl Default for ModelParameters {
    fn default() -> Self {
        Self {
            n_pp: 35.0,
            n_sp: 6.0,
            c_pv_1: 2.5e-3,
            c_pv_2: 9.2e-5,
            c_pv_3: 4.13e-3,
            I_max_0: 7.412,
            V_max_0: 29.0,
            S_ra_0: 1000.0,
            t_pv_0: 25.0,

            tau_e: 0.8,
            tau_f: 5.0,
            tau_O2: 2.91,
            tau_H2O: 78.3,
            tau_H2: 26.1,
            K_O2: 2.52,
            K_H2O: 0.281,
            K_H2: 0.843,
            r_fc: 0.126,
            a_fc: 0.05,
            b_fc: 0.11,
            R_0fc: 8.314,
            T_0fc: 1273.0,
            F_0fc: 96485.0,
            I_L: 800.0,
            K_r: 0.996e-3,
            N_0fc: 384.0,
            E_0fc: 1.18,
            r_H_O: 1.145,
            M_ng: 62.5,
            fu_d: 0.8,

            P_mt_0: 80.0,
            t_ab_0: 7.0,
            tau_mtf: 20.0,
            tau_abf: 130.0,
            tau_abw: 80.0,
            tau_abt: 70.0,
            k_ma_1: -6.862e5,
            k_ma_2: 2.144e4,
            k_ma_3: -1.128e2,
            k_ma_4: -3.863e-2,
            k_ma_5: 1.24,
            k_ma_6: -4.429,
            k_ma_7: 0.957,
            k_ma_8: -11.484,

            A_ci: 2.477,
            A_co: 2.831,
            A_ei: 2.638,
            A_eo: 3.015,
            alpha_r: 4.476,
            alpha_w: 5.08,
            C_cr: 1.339,
            C_er: 1.175,
            C_s: 0.394,
            C_w: 4.2,
            k_r: 1.388,
            M_cr: 9.784,
            M_cs: 94.487,
            M_cw: 79.762,
            M_er: 11.768,
            M_es: 100.61,
            M_ew: 71.396,
            rho_eg: 22.602,
            V_cp: 1.422e-4,
            G_cw: 2.832,
            t_cwi: 28.0,
            // Calibrated so the chiller's steady cooling at N_ec = 110 is
            // 50 kW with 12.6 kW compressor draw.
            delta_h_e: 160.28,
            delta_h_c: 190.68,

            E_m: 50.0,
            R_1b: 4.8e-3,
            R_0b: 4.2e-2,
            C_1b: 1296.0,
            n_pb: 4.0,
            n_sb: 4.0,
            C_eb: 200.0,
            tau_dc: 0.8,

            M_st: 2.0e4,

            S_pmp: 5.204,
            b_pmp_1: -1.007e-2,
            b_pmp_2: 1.308e-1,
            b_pmp_3: 3.552e-1,
            g_e: 9.8,

            Q_fcu_0: 125.0,
            delta_t_wa_0: 15.0,
            G_sl_0: 5.952,
            tau_fcu: 20.0,
            C_br: 5.14e4,
            U_br: 4.063,

            k_fc: 8.889e3,
            k_mt: 1.1956e4,
            k_ab: 0.9375,
            k_ec: 0.4546,
            k_cp: 0.252,
            k_st: 21.0,
            k_pmp: 2.3352,
            k_ba: -1.7361e-6,
            k_pv: 4.5139e-2,
            G_ab_0: 3.5714,
            G_ec_0: 2.381,
        }
    }
}

impl ModelParameters {
    /// Checks the positivity invariants on capacities, areas, masses and
    /// time constants.
    pub fn validate(&self) -> Result<(), ModelError> {
        let positives: [(&str, f64); 30] = [
            ("tau_e", self.tau_e),
            ("tau_f", self.tau_f),
            ("tau_O2", self.tau_O2),
            ("tau_H2O", self.tau_H2O),
            ("tau_H2", self.tau_H2),
            ("tau_mtf", self.tau_mtf),
            ("tau_abf", self.tau_abf),
            ("tau_abw", self.tau_abw),
            ("tau_abt", self.tau_abt),
            ("tau_dc", self.tau_dc),
            ("tau_fcu", self.tau_fcu),
            ("A_ci", self.A_ci),
            ("A_co", self.A_co),
            ("A_ei", self.A_ei),
            ("A_eo", self.A_eo),
            ("C_cr", self.C_cr),
            ("C_er", self.C_er),
            ("C_s", self.C_s),
            ("C_w", self.C_w),
            ("M_cr", self.M_cr),
            ("M_cs", self.M_cs),
            ("M_cw", self.M_cw),
            ("M_er", self.M_er),
            ("M_es", self.M_es),
            ("M_ew", self.M_ew),
            ("M_st", self.M_st),
            ("C_br", self.C_br),
            ("U_br", self.U_br),
            ("C_1b", self.C_1b),
            ("C_eb", self.C_eb),
        ];
        for (name, v) in positives {
            if !(v > 0.0) {
                return Err(ModelError::InvalidParameter {
                    name: name.to_string(),
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// Loads parameters from a flat JSON document.
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let p: Self = serde_json::from_str(text)
            .map_err(|e| ModelError::Config(format!("parameter file: {e}")))?;
        p.validate()?;
        Ok(p)
    }

    /// Serializes parameters to pretty-printed flat JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("parameter serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ModelParameters::default().validate().unwrap();
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let p = ModelParameters::default();
        let text = p.to_json();
        let q = ModelParameters::from_json(&text).unwrap();
        assert_eq!(p, q);
        assert!(text.contains("\"tau_abw\": 80.0"));
    }

    #[test]
    fn rejects_nonpositive_capacity() {
        let mut p = ModelParameters::default();
        p.C_br = 0.0;
        assert!(p.validate().is_err());
    }
}
