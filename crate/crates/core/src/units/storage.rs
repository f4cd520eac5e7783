//! Chilled water storage: cold and hot tank with a shared mass budget.

use crate::error::ModelError;
use crate::params::ModelParameters;

/// Tank quantities that do not depend on the chiller-side mixing.
#[derive(Debug, Clone, Copy, Default)]
pub struct TankTaps {
    /// Remaining cold water mass (kg).
    pub m_stc: f64,
    /// Remaining hot water mass (kg).
    pub m_sth: f64,
    /// Cold tank temperature (degC).
    pub t_stc: f64,
    /// Hot tank temperature (degC).
    pub t_sth: f64,
    /// Signed tank flow, positive when discharging (kg/s).
    pub g_st: f64,
    /// Hot-pipe temperature (degC).
    pub t_hp: f64,
}

/// Full algebraic outputs of the storage unit.
#[derive(Debug, Clone, Copy, Default)]
pub struct StorageOutputs {
    pub taps: TankTaps,
    /// Cold-pipe temperature (degC).
    pub t_cp: f64,
    /// Cooling power, positive when discharging (kW).
    pub q_st: f64,
}

/// Tank masses, temperatures, signed flow and the hot-pipe temperature.
///
/// Errors when a tank that must supply water is empty.
pub fn tank_taps(
    c_sot: f64,
    c_stc: f64,
    c_sth: f64,
    g_stu: f64,
    z_st: bool,
    t_re: f64,
    p: &ModelParameters,
) -> Result<TankTaps, ModelError> {
    if g_stu < 0.0 {
        return Err(ModelError::domain(
            "storage",
            format!("negative tank flow magnitude G_stu = {g_stu}"),
        ));
    }
    let m_stc = c_sot * p.M_st;
    // Complement against the total so the mass budget is exact in floating
    // point.
    let m_sth = p.M_st - m_stc;
    const MIN_MASS: f64 = 1e-6;
    let draining = g_stu > 0.0;
    if draining && z_st && m_stc <= MIN_MASS {
        return Err(ModelError::capacity(
            "storage",
            format!("cold tank empty (m_stc = {m_stc:.3e} kg) while discharging"),
        ));
    }
    if draining && !z_st && m_sth <= MIN_MASS {
        return Err(ModelError::capacity(
            "storage",
            format!("hot tank empty (m_sth = {m_sth:.3e} kg) while charging"),
        ));
    }
    let t_stc = if m_stc > MIN_MASS { c_stc / m_stc } else { 0.0 };
    let t_sth = if m_sth > MIN_MASS { c_sth / m_sth } else { 0.0 };
    let zf = if z_st { 1.0 } else { 0.0 };
    let g_st = zf * g_stu + (zf - 1.0) * g_stu;
    let t_hp = zf * t_re + (1.0 - zf) * t_sth;
    Ok(TankTaps {
        m_stc,
        m_sth,
        t_stc,
        t_sth,
        g_st,
        t_hp,
    })
}

/// Right-hand side of the states `(C_sot, C_stc, C_sth)`.
///
/// `t_slc` is the mixed chiller supply temperature feeding the cold tank in
/// charging mode.
pub fn storage_rhs(
    c_sot: f64,
    c_stc: f64,
    c_sth: f64,
    g_stu: f64,
    z_st: bool,
    t_slc: f64,
    t_re: f64,
    p: &ModelParameters,
) -> Result<([f64; 3], StorageOutputs), ModelError> {
    let taps = tank_taps(c_sot, c_stc, c_sth, g_stu, z_st, t_re, p)?;
    let zf = if z_st { 1.0 } else { 0.0 };
    let t_cp = zf * taps.t_stc + (1.0 - zf) * t_slc;
    let q_st = taps.g_st * p.C_w * (taps.t_hp - t_cp);

    let d_c_sot = -taps.g_st / p.M_st;
    let d_c_stc = -taps.g_st * t_cp;
    let d_c_sth = taps.g_st * taps.t_hp;

    Ok((
        [d_c_sot, d_c_stc, d_c_sth],
        StorageOutputs { taps, t_cp, q_st },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn switching_identity() {
        let p = ModelParameters::default();
        let d = tank_taps(0.5, 70000.0, 120000.0, 2.0, true, 12.0, &p).unwrap();
        assert_eq!(d.g_st, 2.0);
        let c = tank_taps(0.5, 70000.0, 120000.0, 2.0, false, 12.0, &p).unwrap();
        assert_eq!(c.g_st, -2.0);
    }

    #[test]
    fn discharge_cooling_power() {
        let p = ModelParameters::default();
        // Cold tank at 7 degC, return water at 12: 1 kg/s delivers 21 kW.
        let (_, out) = storage_rhs(0.5, 7.0 * 10000.0, 120000.0, 1.0, true, 7.5, 12.0, &p).unwrap();
        assert_relative_eq!(out.q_st, 21.0, epsilon = 1e-9);
        assert_relative_eq!(out.q_st, p.k_st * 1.0, epsilon = 1e-9);
    }

    #[test]
    fn full_tank_energy_matches_rating() {
        let p = ModelParameters::default();
        // 5 degC swing across the full tank mass.
        let kwh = p.M_st * p.C_w * 5.0 / 3600.0;
        assert_relative_eq!(kwh, 116.66666666666667, epsilon = 1e-9);
        assert!((kwh - 117.0).abs() < 0.5);
    }

    #[test]
    fn mass_conservation_is_structural() {
        let p = ModelParameters::default();
        let taps = tank_taps(0.37, 50000.0, 140000.0, 0.8, true, 12.0, &p).unwrap();
        assert_relative_eq!(taps.m_stc + taps.m_sth, p.M_st, epsilon = 1e-12);
    }

    #[test]
    fn draining_an_empty_tank_is_a_capacity_error() {
        let p = ModelParameters::default();
        assert!(matches!(
            tank_taps(0.0, 0.0, 240000.0, 1.0, true, 12.0, &p),
            Err(ModelError::Capacity { .. })
        ));
        assert!(matches!(
            tank_taps(1.0, 240000.0, 0.0, 1.0, false, 12.0, &p),
            Err(ModelError::Capacity { .. })
        ));
        // No flow, no error.
        assert!(tank_taps(0.0, 0.0, 240000.0, 0.0, true, 12.0, &p).is_ok());
    }
}
