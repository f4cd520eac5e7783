//! Compact nonlinear plant: composition of the seven operating units.

use crate::error::ModelError;
use crate::params::ModelParameters;
use crate::state::{idx, ContinuousInput, Disturbance, IntegerInput, PlantState, NX};
use crate::units;

macro_rules! algebraic_record {
    ($($field:ident),* $(,)?) => {
        /// Every intermediate algebraic quantity of one plant evaluation,
        /// in a fixed column order for logging.
        #[derive(Debug, Clone, Copy, Default)]
        pub struct AlgebraicRecord {
            $(pub $field: f64,)*
        }

        impl AlgebraicRecord {
            /// Column names, aligned with [`AlgebraicRecord::values`].
            pub const NAMES: &'static [&'static str] = &[$(stringify!($field)),*];

            /// Values in column order.
            pub fn values(&self) -> Vec<f64> {
                vec![$(self.$field),*]
            }
        }
    };
}

algebraic_record!(
    p_pv, i_pv_max, v_pv_max, v_0, v_fc, eta_a, eta_c, eta_o, i_fc, p_fc, g_o2, g_h2r, p_mt, t_ab,
    q_ab, t_rec, t_slc, t_sl, g_sl, g_all, p_pmp, h_pmp, eta_pmp, q_fcu, t_re_cal, q_sl, g_r, p_c,
    p_e, p_r, eta_vl, w_i, eta_cp, p_cp, t_ec, q_ec, g_st, t_cp, t_hp, t_stc, t_sth, m_stc, m_sth,
    q_st, i_ba_cell, v_ba, i_ba_cal, p_ba_d, p_ba,
);

/// Outputs of one plant evaluation: the two controlled outputs plus the
/// full algebraic record.
#[derive(Debug, Clone, Copy, Default)]
pub struct PlantOutputs {
    /// Electric power supplied to the customers (kW).
    pub p_sl: f64,
    /// Building temperature (degC).
    pub t_br: f64,
    pub rec: AlgebraicRecord,
}

/// Evaluates the full plant right-hand side and every algebraic output.
pub fn plant_rhs(
    x: &PlantState,
    u: &ContinuousInput,
    z: &IntegerInput,
    w: &Disturbance,
    p: &ModelParameters,
) -> Result<(PlantState, PlantOutputs), ModelError> {
    let mut dx = PlantState::zeros();
    let mut rec = AlgebraicRecord::default();

    // Photovoltaic unit.
    let pv = units::pv_power(w.t_a, w.s_ra, p);
    rec.p_pv = pv.p_pv;
    rec.i_pv_max = pv.i_pv_max;
    rec.v_pv_max = pv.v_pv_max;

    // Tank taps feed the return-side mixing.
    let taps = units::tank_taps(
        x.c_sot(),
        x.c_stc(),
        x.c_sth(),
        u.g_stu,
        z.z_st,
        x.t_re(),
        p,
    )?;
    let t_rec = units::chiller_return_temp(u.g_ab, u.g_ec, taps.g_st, x.t_re(), taps.t_hp)?;

    // Microturbine with absorption chiller.
    let (d_mt, mt) = units::microturbine_rhs(
        x.p_mtf(),
        x.t_abf(),
        x.t_abw(),
        x.t_abt(),
        u.g_fm,
        u.g_ab,
        t_rec,
        z.z_ma,
        p,
    );
    dx[idx::P_MTF] = d_mt[0];
    dx[idx::T_ABF] = d_mt[1];
    dx[idx::T_ABW] = d_mt[2];
    dx[idx::T_ABT] = d_mt[3];
    rec.p_mt = mt.p_mt;
    rec.t_ab = mt.t_ab;
    rec.q_ab = mt.q_ab;

    // Electric chiller.
    let (d_ec, ec) = units::electric_chiller_rhs(
        x.t_c(),
        x.t_cs(),
        x.t_cwm(),
        x.t_e(),
        x.t_es(),
        x.t_ewm(),
        u.n_ec,
        u.g_ec,
        t_rec,
        z.z_ec,
        p,
    )?;
    dx[idx::T_C] = d_ec[0];
    dx[idx::T_CS] = d_ec[1];
    dx[idx::T_CWM] = d_ec[2];
    dx[idx::T_E] = d_ec[3];
    dx[idx::T_ES] = d_ec[4];
    dx[idx::T_EWM] = d_ec[5];
    rec.g_r = ec.g_r;
    rec.p_c = ec.p_c;
    rec.p_e = ec.p_e;
    rec.p_r = ec.p_r;
    rec.eta_vl = ec.eta_vl;
    rec.w_i = ec.w_i;
    rec.eta_cp = ec.eta_cp;
    rec.p_cp = ec.p_cp;
    rec.t_ec = ec.t_ec;
    rec.q_ec = ec.q_ec;

    // Chilled water storage (needs the mixed chiller supply temperature).
    let g_ch = u.g_ab + u.g_ec;
    let t_slc = if g_ch > units::pipeline::FLOW_EPS {
        (u.g_ab * mt.t_ab + u.g_ec * ec.t_ec) / g_ch
    } else {
        0.0
    };
    let (d_st, st) = units::storage_rhs(
        x.c_sot(),
        x.c_stc(),
        x.c_sth(),
        u.g_stu,
        z.z_st,
        t_slc,
        x.t_re(),
        p,
    )?;
    dx[idx::C_SOT] = d_st[0];
    dx[idx::C_STC] = d_st[1];
    dx[idx::C_STH] = d_st[2];
    rec.g_st = st.taps.g_st;
    rec.t_cp = st.t_cp;
    rec.t_hp = st.taps.t_hp;
    rec.t_stc = st.taps.t_stc;
    rec.t_sth = st.taps.t_sth;
    rec.m_stc = st.taps.m_stc;
    rec.m_sth = st.taps.m_sth;
    rec.q_st = st.q_st;

    // Pipeline, pump, fan coils and building.
    let (d_pl, pl) = units::pipeline_and_building_rhs(
        x.t_re(),
        x.t_br(),
        u.g_ab,
        u.g_ec,
        st.taps.g_st,
        u.g_stu,
        mt.t_ab,
        ec.t_ec,
        st.t_cp,
        st.taps.t_hp,
        w.t_a,
        w.q_other,
        p,
    )?;
    dx[idx::T_RE] = d_pl[0];
    dx[idx::T_BR] = d_pl[1];
    rec.t_rec = pl.t_rec;
    rec.t_slc = pl.t_slc;
    rec.t_sl = pl.t_sl;
    rec.g_sl = pl.g_sl;
    rec.g_all = pl.g_all;
    rec.p_pmp = pl.p_pmp;
    rec.h_pmp = pl.h_pmp;
    rec.eta_pmp = pl.eta_pmp;
    rec.q_fcu = pl.q_fcu;
    rec.t_re_cal = pl.t_re_cal;
    rec.q_sl = pl.q_sl;

    // Fuel cell.
    let (d_fc, fc) = units::fuel_cell_rhs(
        x.i_f(),
        x.g_h2(),
        x.p_o2(),
        x.p_h2o(),
        x.p_h2(),
        u.g_ff,
        z.z_fc,
        p,
    )?;
    dx[idx::I_F] = d_fc[0];
    dx[idx::G_H2] = d_fc[1];
    dx[idx::P_O2] = d_fc[2];
    dx[idx::P_H2O] = d_fc[3];
    dx[idx::P_H2] = d_fc[4];
    rec.v_0 = fc.v_0;
    rec.v_fc = fc.v_fc;
    rec.eta_a = fc.eta_a;
    rec.eta_c = fc.eta_c;
    rec.eta_o = fc.eta_o;
    rec.i_fc = fc.i_fc;
    rec.p_fc = fc.p_fc;
    rec.g_o2 = fc.g_o2;
    rec.g_h2r = fc.g_h2r;

    // Battery bank closes the electric balance.
    let p_ba_d = w.p_d + rec.p_cp + rec.p_pmp - rec.p_pv - rec.p_fc - rec.p_mt;
    let (d_ba, ba) = units::battery_rhs(x.v_cap(), x.c_soc(), x.i_ba(), p_ba_d, p)?;
    dx[idx::V_CAP] = d_ba[0];
    dx[idx::C_SOC] = d_ba[1];
    dx[idx::I_BA] = d_ba[2];
    rec.i_ba_cell = ba.i_ba_cell;
    rec.v_ba = ba.v_ba;
    rec.i_ba_cal = ba.i_ba_cal;
    rec.p_ba_d = p_ba_d;
    rec.p_ba = ba.p_ba;

    let p_sl = rec.p_pv + rec.p_fc + rec.p_mt + rec.p_ba - rec.p_cp - rec.p_pmp;

    Ok((
        dx,
        PlantOutputs {
            p_sl,
            t_br: x.t_br(),
            rec,
        },
    ))
}

/// Derivative of the plant as a flat array, for generic integration.
pub fn plant_rhs_array(
    x: &[f64; NX],
    u: &ContinuousInput,
    z: &IntegerInput,
    w: &Disturbance,
    p: &ModelParameters,
) -> Result<[f64; NX], ModelError> {
    let (dx, _) = plant_rhs(&PlantState(*x), u, z, w, p)?;
    Ok(dx.0)
}
