//! Reduced-order slow, medium and fast subsystem right-hand sides.
//!
//! The medium and fast derivatives are expressed in their stretched time
//! scales; integrating them with steps `dt / eps` reproduces the physical
//! evolution over `dt`.

use crate::decomposition::elimination::Eliminator;
use crate::decomposition::partition::{
    embed, FAST_STATES, MEDIUM_STATES, N_FAST, N_MEDIUM, N_SLOW, SLOW_STATES,
};
use crate::error::ModelError;
use crate::params::ModelParameters;
use crate::plant::{plant_rhs, PlantOutputs};
use crate::state::{ContinuousInput, Disturbance, IntegerInput};

/// Separation parameters derived from the representative time constants.
pub fn separation_eps(p: &ModelParameters) -> (f64, f64) {
    let tau_slow = p.C_br / p.U_br;
    (p.tau_f / tau_slow, p.tau_abt / tau_slow)
}

/// Result of one slow-subsystem evaluation.
#[derive(Debug, Clone)]
pub struct SlowRhs {
    /// Slow state derivative in original time (1/s units per component).
    pub dx_s: [f64; N_SLOW],
    /// Building temperature.
    pub y_s: f64,
    /// Electric power output.
    pub y_mf: f64,
    /// Eliminated medium states.
    pub x_m: [f64; N_MEDIUM],
    /// Eliminated fast states.
    pub x_f: [f64; N_FAST],
    pub out: PlantOutputs,
}

/// Result of one medium-subsystem evaluation.
#[derive(Debug, Clone)]
pub struct MediumRhs {
    /// Medium state derivative in the medium stretched time.
    pub dx_m_stretched: [f64; N_MEDIUM],
    pub y_mf: f64,
    /// Eliminated fast states.
    pub x_f: [f64; N_FAST],
    pub out: PlantOutputs,
}

/// Result of one fast-subsystem evaluation.
#[derive(Debug, Clone)]
pub struct FastRhs {
    /// Fast state derivative in the fast stretched time.
    pub dx_f_stretched: [f64; N_FAST],
    pub y_mf: f64,
    pub out: PlantOutputs,
}

/// Slow subsystem: the medium and fast states are eliminated, then the slow
/// components of the plant derivative are evaluated at the quasi-steady
/// point.
pub fn slow_rhs(
    elim: &Eliminator,
    x_s: &[f64; N_SLOW],
    u: &ContinuousInput,
    z: &IntegerInput,
    w: &Disturbance,
    hint: Option<(&[f64; N_MEDIUM], &[f64; N_FAST])>,
) -> Result<SlowRhs, ModelError> {
    let (x_m, x_f) = elim.medium_fast_equilibrium(x_s, u, z, w, hint)?;
    let x = embed(x_s, &x_m, &x_f);
    let (dx, out) = plant_rhs(&x, u, z, w, &elim.params)?;
    Ok(SlowRhs {
        dx_s: SLOW_STATES.map(|i| dx[i]),
        y_s: x.t_br(),
        y_mf: out.p_sl,
        x_m,
        x_f,
        out,
    })
}

/// Medium subsystem: the fast states are eliminated at frozen slow states;
/// the derivative is returned in the medium stretched time.
pub fn medium_rhs(
    elim: &Eliminator,
    x_s: &[f64; N_SLOW],
    x_m: &[f64; N_MEDIUM],
    u: &ContinuousInput,
    z: &IntegerInput,
    w: &Disturbance,
    hint: Option<&[f64; N_FAST]>,
) -> Result<MediumRhs, ModelError> {
    let (_, eps2) = separation_eps(&elim.params);
    let x_f = elim.fast_equilibrium(x_s, x_m, u, z, w, hint)?;
    let x = embed(x_s, x_m, &x_f);
    let (dx, out) = plant_rhs(&x, u, z, w, &elim.params)?;
    Ok(MediumRhs {
        dx_m_stretched: MEDIUM_STATES.map(|i| eps2 * dx[i]),
        y_mf: out.p_sl,
        x_f,
        out,
    })
}

/// Fast subsystem: slow and medium states frozen, no elimination; the
/// derivative is returned in the fast stretched time.
pub fn fast_rhs(
    params: &ModelParameters,
    x_s: &[f64; N_SLOW],
    x_m: &[f64; N_MEDIUM],
    x_f: &[f64; N_FAST],
    u: &ContinuousInput,
    z: &IntegerInput,
    w: &Disturbance,
) -> Result<FastRhs, ModelError> {
    let (eps1, _) = separation_eps(params);
    let x = embed(x_s, x_m, x_f);
    let (dx, out) = plant_rhs(&x, u, z, w, params)?;
    Ok(FastRhs {
        dx_f_stretched: FAST_STATES.map(|i| eps1 * dx[i]),
        y_mf: out.p_sl,
        out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::partition::{project_fast, project_medium, project_slow};
    use crate::integrator::PlantIntegrator;
    use crate::state::idx;
    use approx::assert_relative_eq;

    fn nominal() -> (
        Eliminator,
        [f64; N_SLOW],
        ContinuousInput,
        IntegerInput,
        Disturbance,
    ) {
        let elim = Eliminator::new(ModelParameters::default());
        let x_s = [0.5, 0.5, 7.0 * 10000.0, 12.0 * 10000.0, 24.0];
        let u = ContinuousInput::from_array([0.003, 0.005, 3.0, 90.0, 2.0, 0.5]);
        let z = IntegerInput::from_array([true, true, true, true]);
        let w = Disturbance {
            t_a: 30.0,
            s_ra: 500.0,
            p_d: 100.0,
            q_other: 20.0,
        };
        (elim, x_s, u, z, w)
    }

    #[test]
    fn slow_output_is_a_projection() {
        let (elim, x_s, u, z, w) = nominal();
        let r = slow_rhs(&elim, &x_s, &u, &z, &w, None).unwrap();
        assert_eq!(r.y_s, x_s[4]);
    }

    #[test]
    fn tank_capacity_derivative_is_input_only() {
        // dC_sot does not depend on the eliminated states at all.
        let (elim, x_s, u, z, w) = nominal();
        let r = slow_rhs(&elim, &x_s, &u, &z, &w, None).unwrap();
        // z_st = 1 discharging at G_stu = 0.5.
        assert_relative_eq!(r.dx_s[1], -0.5 / elim.params.M_st, epsilon = 1e-15);
    }

    #[test]
    fn elimination_consistency_with_plant() {
        // Embedding the eliminated states into the plant yields medium/fast
        // residuals below tolerance and a slow derivative equal to the
        // reduced model's.
        let (elim, x_s, u, z, w) = nominal();
        let r = slow_rhs(&elim, &x_s, &u, &z, &w, None).unwrap();
        let x = embed(&x_s, &r.x_m, &r.x_f);
        let (dx, _) = plant_rhs(&x, &u, &z, &w, &elim.params).unwrap();
        for &i in MEDIUM_STATES.iter().chain(&FAST_STATES) {
            assert!(dx[i].abs() < 1e-8, "residual at {i}: {}", dx[i]);
        }
        for (k, &i) in SLOW_STATES.iter().enumerate() {
            assert!((dx[i] - r.dx_s[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn medium_fixed_point_has_zero_derivative() {
        let (elim, x_s, u, z, w) = nominal();
        let full = slow_rhs(&elim, &x_s, &u, &z, &w, None).unwrap();
        let r = medium_rhs(&elim, &x_s, &full.x_m, &u, &z, &w, Some(&full.x_f)).unwrap();
        for d in r.dx_m_stretched {
            assert!(d.abs() < 1e-6, "stretched derivative {d}");
        }
        // The output matches the plant evaluated at the same embedded state.
        let x = embed(&x_s, &full.x_m, &r.x_f);
        let (_, out) = plant_rhs(&x, &u, &z, &w, &elim.params).unwrap();
        assert!((r.y_mf - out.p_sl).abs() < 1e-6);
    }

    #[test]
    fn stretched_scaling_identities() {
        let (elim, x_s, u, z, w) = nominal();
        let (eps1, eps2) = separation_eps(&elim.params);
        let full = slow_rhs(&elim, &x_s, &u, &z, &w, None).unwrap();

        // Perturb away from equilibrium so derivatives are nonzero.
        let x_m: [f64; N_MEDIUM] = full.x_m.map(|v| v * 1.05 + 0.01);
        let x_f: [f64; N_FAST] = full.x_f.map(|v| v * 1.05 + 0.01);
        let x = embed(&x_s, &x_m, &x_f);
        let (dx_phys, _) = plant_rhs(&x, &u, &z, &w, &elim.params).unwrap();

        let f = fast_rhs(&elim.params, &x_s, &x_m, &x_f, &u, &z, &w).unwrap();
        for (k, &i) in FAST_STATES.iter().enumerate() {
            assert_relative_eq!(f.dx_f_stretched[k], eps1 * dx_phys[i], epsilon = 1e-12);
        }

        let m = medium_rhs(&elim, &x_s, &x_m, &u, &z, &w, Some(&x_f)).unwrap();
        // The medium derivative is evaluated at the re-eliminated fast
        // state, so compare against the plant at that embedding.
        let xe = embed(&x_s, &x_m, &m.x_f);
        let (dx_e, _) = plant_rhs(&xe, &u, &z, &w, &elim.params).unwrap();
        for (k, &i) in MEDIUM_STATES.iter().enumerate() {
            assert_relative_eq!(m.dx_m_stretched[k], eps2 * dx_e[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn battery_current_step_relaxes_with_tau_dc() {
        // After a demand step the bank current relaxes to the algebra-driven
        // value as a first-order lag with time constant tau_dc.
        let (elim, x_s, u, z, w) = nominal();
        let p = elim.params.clone();
        let full = slow_rhs(&elim, &x_s, &u, &z, &w, None).unwrap();

        let mut w2 = w;
        w2.p_d += 5.0;
        let x0 = embed(&x_s, &full.x_m, &full.x_f);
        let integ = PlantIntegrator::new(p.clone());
        let traj = integ.integrate(&x0, &u, &z, &w2, 4.0, 1).unwrap();

        // Track the analytic first-order response of I_ba toward the moving
        // target I_ba_cal; over 5 tau_dc the relative gap must shrink as
        // exp(-t/tau).
        let i0 = x0[idx::I_BA];
        let target = traj.points.last().unwrap().out.rec.i_ba_cal;
        let at = |t: f64| -> f64 {
            traj.points
                .iter()
                .min_by(|a, b| (a.t - t).abs().partial_cmp(&(b.t - t).abs()).unwrap())
                .unwrap()
                .x[idx::I_BA]
        };
        let predicted = target + (i0 - target) * (-2.0 / p.tau_dc).exp();
        assert!(
            (at(2.0) - predicted).abs() < 0.05 * (target - i0).abs().max(1.0),
            "first-order response mismatch: {} vs {}",
            at(2.0),
            predicted
        );
    }
}
