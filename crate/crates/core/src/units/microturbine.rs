//! Microturbine integrated with an absorption chiller.

use crate::params::ModelParameters;

/// Algebraic outputs of the microturbine and absorption chiller.
#[derive(Debug, Clone, Copy, Default)]
pub struct MicroturbineOutputs {
    /// Microturbine electric power (kW).
    pub p_mt: f64,
    /// Absorption-chiller supply water temperature (degC).
    pub t_ab: f64,
    /// Absorption-chiller cooling power (kW).
    pub q_ab: f64,
}

/// Right-hand side of the states `(P_mtf, t_abf, t_abw, t_abt)`.
pub fn microturbine_rhs(
    p_mtf: f64,
    t_abf: f64,
    t_abw: f64,
    t_abt: f64,
    g_fm: f64,
    g_ab: f64,
    t_rec: f64,
    z_ma: bool,
    p: &ModelParameters,
) -> ([f64; 4], MicroturbineOutputs) {
    if !z_ma {
        return ([0.0; 4], MicroturbineOutputs::default());
    }
    let d_p_mtf = (p.k_ma_1 * g_fm * g_fm + p.k_ma_2 * g_fm + p.k_ma_3 - p_mtf) / p.tau_mtf;
    let d_t_abf = (p.k_ma_4 * p_mtf - t_abf) / p.tau_abf;
    let d_t_abw = (p.k_ma_5 * g_ab + p.k_ma_6 - t_abw) / p.tau_abw;
    let d_t_abt = (p.k_ma_7 * t_rec + p.k_ma_8 - t_abt) / p.tau_abt;

    let p_mt = p.P_mt_0 + p_mtf;
    let t_ab = p.t_ab_0 + t_abf + t_abw + t_abt;
    let q_ab = g_ab * p.C_w * (t_rec - t_ab);

    (
        [d_p_mtf, d_t_abf, d_t_abw, d_t_abt],
        MicroturbineOutputs { p_mt, t_ab, q_ab },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn switched_off_is_inert() {
        let p = ModelParameters::default();
        let (dx, out) = microturbine_rhs(3.0, 1.0, 0.5, 2.0, 0.005, 3.0, 12.0, false, &p);
        assert_eq!(dx, [0.0; 4]);
        assert_eq!(out.p_mt, 0.0);
        assert_eq!(out.t_ab, 0.0);
    }

    #[test]
    fn steady_power_at_max_fuel_matches_rating() {
        let p = ModelParameters::default();
        let g_fm = 0.0066911;
        let p_mtf_ss = p.k_ma_1 * g_fm * g_fm + p.k_ma_2 * g_fm + p.k_ma_3;
        assert_relative_eq!(p_mtf_ss, -0.06455214190198433, epsilon = 1e-9);
        let (dx, out) = microturbine_rhs(p_mtf_ss, 0.0, 0.0, 0.0, g_fm, 3.5714, 12.0, true, &p);
        assert!(dx[0].abs() < 1e-12);
        assert!((out.p_mt - 80.0).abs() < 0.1, "P_mt = {}", out.p_mt);
    }

    #[test]
    fn cooling_power_at_nominal_flow() {
        let p = ModelParameters::default();
        // Hold the temperature states so t_ab = 7 degC, return water at 12.
        let (_, out) = microturbine_rhs(0.0, 0.0, 0.0, 0.0, 0.0066911, 3.5714, 12.0, true, &p);
        assert_relative_eq!(out.t_ab, 7.0, epsilon = 1e-12);
        assert_relative_eq!(out.q_ab, 3.5714 * 4.2 * 5.0, epsilon = 1e-9);
        assert!((out.q_ab - 75.0).abs() < 0.01);
    }
}
