//! State, input and disturbance vectors of the plant, plus operating bounds.

use serde::{Deserialize, Serialize};

/// Number of continuous plant states.
pub const NX: usize = 23;
/// Number of continuous manipulated inputs.
pub const NU: usize = 6;
/// Number of binary manipulated inputs.
pub const NZ: usize = 4;

/// Zero-based positions of the plant states in the state vector.
pub mod idx {
    pub const I_F: usize = 0;
    pub const G_H2: usize = 1;
    pub const P_O2: usize = 2;
    pub const P_H2O: usize = 3;
    pub const P_H2: usize = 4;
    pub const P_MTF: usize = 5;
    pub const T_ABF: usize = 6;
    pub const T_ABW: usize = 7;
    pub const T_ABT: usize = 8;
    pub const T_C: usize = 9;
    pub const T_CS: usize = 10;
    pub const T_CWM: usize = 11;
    pub const T_E: usize = 12;
    pub const T_ES: usize = 13;
    pub const T_EWM: usize = 14;
    pub const V_CAP: usize = 15;
    pub const C_SOC: usize = 16;
    pub const I_BA: usize = 17;
    pub const C_SOT: usize = 18;
    pub const C_STC: usize = 19;
    pub const C_STH: usize = 20;
    pub const T_RE: usize = 21;
    pub const T_BR: usize = 22;
}

/// Column names of the state vector, in order.
pub const STATE_NAMES: [&str; NX] = [
    "I_f", "G_H2", "p_O2", "p_H2O", "p_H2", "P_mtf", "t_abf", "t_abw", "t_abt", "t_c", "t_cs",
    "t_cwm", "t_e", "t_es", "t_ewm", "v_cap", "C_soc", "I_ba", "C_sot", "C_stc", "C_sth", "t_re",
    "t_br",
];

/// The 23-dimensional continuous plant state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantState(pub [f64; NX]);

impl PlantState {
    pub fn zeros() -> Self {
        Self([0.0; NX])
    }

    pub fn i_f(&self) -> f64 {
        self.0[idx::I_F]
    }
    pub fn g_h2(&self) -> f64 {
        self.0[idx::G_H2]
    }
    pub fn p_o2(&self) -> f64 {
        self.0[idx::P_O2]
    }
    pub fn p_h2o(&self) -> f64 {
        self.0[idx::P_H2O]
    }
    pub fn p_h2(&self) -> f64 {
        self.0[idx::P_H2]
    }
    pub fn p_mtf(&self) -> f64 {
        self.0[idx::P_MTF]
    }
    pub fn t_abf(&self) -> f64 {
        self.0[idx::T_ABF]
    }
    pub fn t_abw(&self) -> f64 {
        self.0[idx::T_ABW]
    }
    pub fn t_abt(&self) -> f64 {
        self.0[idx::T_ABT]
    }
    pub fn t_c(&self) -> f64 {
        self.0[idx::T_C]
    }
    pub fn t_cs(&self) -> f64 {
        self.0[idx::T_CS]
    }
    pub fn t_cwm(&self) -> f64 {
        self.0[idx::T_CWM]
    }
    pub fn t_e(&self) -> f64 {
        self.0[idx::T_E]
    }
    pub fn t_es(&self) -> f64 {
        self.0[idx::T_ES]
    }
    pub fn t_ewm(&self) -> f64 {
        self.0[idx::T_EWM]
    }
    pub fn v_cap(&self) -> f64 {
        self.0[idx::V_CAP]
    }
    pub fn c_soc(&self) -> f64 {
        self.0[idx::C_SOC]
    }
    pub fn i_ba(&self) -> f64 {
        self.0[idx::I_BA]
    }
    pub fn c_sot(&self) -> f64 {
        self.0[idx::C_SOT]
    }
    pub fn c_stc(&self) -> f64 {
        self.0[idx::C_STC]
    }
    pub fn c_sth(&self) -> f64 {
        self.0[idx::C_STH]
    }
    pub fn t_re(&self) -> f64 {
        self.0[idx::T_RE]
    }
    pub fn t_br(&self) -> f64 {
        self.0[idx::T_BR]
    }
}

impl std::ops::Index<usize> for PlantState {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for PlantState {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Continuous manipulated inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousInput {
    /// Fuel-cell natural gas flow (kg/s).
    pub g_ff: f64,
    /// Microturbine natural gas flow (kg/s).
    pub g_fm: f64,
    /// Absorption-chiller water flow (kg/s).
    pub g_ab: f64,
    /// Compressor frequency (Hz).
    pub n_ec: f64,
    /// Electric-chiller water flow (kg/s).
    pub g_ec: f64,
    /// Tank water flow magnitude (kg/s).
    pub g_stu: f64,
}

/// Column names of the continuous input vector, in order.
pub const INPUT_NAMES: [&str; NU] = ["G_ff", "G_fm", "G_ab", "N_ec", "G_ec", "G_stu"];

impl ContinuousInput {
    pub fn zeros() -> Self {
        Self::from_array([0.0; NU])
    }

    pub fn from_array(u: [f64; NU]) -> Self {
        Self {
            g_ff: u[0],
            g_fm: u[1],
            g_ab: u[2],
            n_ec: u[3],
            g_ec: u[4],
            g_stu: u[5],
        }
    }

    pub fn to_array(self) -> [f64; NU] {
        [
            self.g_ff, self.g_fm, self.g_ab, self.n_ec, self.g_ec, self.g_stu,
        ]
    }
}

/// Binary manipulated inputs (unit start/stop and tank mode).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerInput {
    /// Fuel cell on/off.
    pub z_fc: bool,
    /// Microturbine with absorption chiller on/off.
    pub z_ma: bool,
    /// Electric chiller on/off.
    pub z_ec: bool,
    /// Tank discharging (true) or charging (false).
    pub z_st: bool,
}

/// Column names of the binary input vector, in order.
pub const BINARY_NAMES: [&str; NZ] = ["z_fc", "z_ma", "z_ec", "z_st"];

impl IntegerInput {
    pub fn all_off() -> Self {
        Self {
            z_fc: false,
            z_ma: false,
            z_ec: false,
            z_st: false,
        }
    }

    pub fn from_array(z: [bool; NZ]) -> Self {
        Self {
            z_fc: z[0],
            z_ma: z[1],
            z_ec: z[2],
            z_st: z[3],
        }
    }

    pub fn to_array(self) -> [bool; NZ] {
        [self.z_fc, self.z_ma, self.z_ec, self.z_st]
    }

    pub fn to_f64(self) -> [f64; NZ] {
        self.to_array().map(|b| if b { 1.0 } else { 0.0 })
    }
}

/// Exogenous disturbances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disturbance {
    /// Ambient temperature (degC).
    pub t_a: f64,
    /// Solar radiation (W/m^2).
    pub s_ra: f64,
    /// Electric demand (kW).
    pub p_d: f64,
    /// Other cooling load (kW).
    pub q_other: f64,
}

/// Column names of the disturbance vector, in order.
pub const DISTURBANCE_NAMES: [&str; 4] = ["t_a", "S_ra", "P_d", "Q_other"];

impl Disturbance {
    pub fn to_array(self) -> [f64; 4] {
        [self.t_a, self.s_ra, self.p_d, self.q_other]
    }
}

/// Operating bounds of the plant: inputs, input rates, states and outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingBounds {
    pub u_min: [f64; NU],
    pub u_max: [f64; NU],
    /// Input rate bounds per second; the limit over a sample of length
    /// `dt` is `du * dt`.
    pub du_min: [f64; NU],
    pub du_max: [f64; NU],
    pub x_min: [f64; NX],
    pub x_max: [f64; NX],
    pub y_min: [f64; 2],
    pub y_max: [f64; 2],
}

impl Default for OperatingBounds {
    fn default() -> Self {
        Self {
            u_min: [0.00055, 0.002, 1.9, 20.0, 1.3, 0.0],
            u_max: [0.0045, 0.0066911, 3.5714, 110.0, 2.381, 1.0],
            du_min: [-0.00395, -0.001173, -0.418, -70.0, -0.271, -0.25],
            du_max: [0.00395, 0.001173, 0.418, 70.0, 0.271, 0.25],
            x_min: [
                13.0, 0.03, 0.006, 0.095, 0.002, -75.0, -0.5, -4.0, -5.0, 27.0, 25.0, 25.0, -5.0,
                0.0, 7.0, -0.19, 0.1, -145.0, 0.1, 2000.0, 0.0, 8.0, 18.0,
            ],
            x_max: [
                130.0, 0.4, 0.06, 1.0, 0.08, 5.0, 3.0, 1.0, 10.0, 44.0, 38.0, 35.0, 20.0, 22.0,
                22.0, 0.19, 0.9, 155.0, 1.0, 240000.0, 324000.0, 18.0, 26.0,
            ],
            y_min: [0.0, 18.0],
            y_max: [195.0, 26.0],
        }
    }
}

impl OperatingBounds {
    /// Input range per channel, used for cost normalization.
    pub fn u_range(&self) -> [f64; NU] {
        std::array::from_fn(|i| self.u_max[i] - self.u_min[i])
    }

    /// State range per channel, used for cost normalization.
    pub fn x_range(&self) -> [f64; NX] {
        std::array::from_fn(|i| self.x_max[i] - self.x_min[i])
    }
}
