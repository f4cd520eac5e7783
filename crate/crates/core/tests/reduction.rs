//! Validation of the reduced-order models against the full plant.

use ies_core::decomposition::{
    embed, fast_rhs, medium_rhs, project_fast, project_medium, project_slow, slow_rhs, Eliminator,
    FAST_STATES, N_FAST, N_MEDIUM, N_SLOW,
};
use ies_core::state::{idx, ContinuousInput, Disturbance, IntegerInput, OperatingBounds};
use ies_core::{ModelParameters, PlantIntegrator};

fn nominal_slow() -> [f64; N_SLOW] {
    [0.5, 0.5, 7.0 * 10000.0, 12.0 * 10000.0, 24.0]
}

fn nominal_case() -> (ContinuousInput, IntegerInput, Disturbance) {
    (
        ContinuousInput::from_array([0.003, 0.005, 3.0, 90.0, 2.0, 0.5]),
        IntegerInput::from_array([true, true, true, true]),
        Disturbance {
            t_a: 30.0,
            s_ra: 500.0,
            p_d: 100.0,
            q_other: 20.0,
        },
    )
}

/// RK4 integration of the reduced slow model with elimination hints
/// threaded along the trajectory.
fn integrate_slow(
    elim: &Eliminator,
    x_s0: [f64; N_SLOW],
    u: &ContinuousInput,
    z: &IntegerInput,
    w: &Disturbance,
    horizon: f64,
    step: f64,
) -> ([f64; N_SLOW], [f64; N_MEDIUM], [f64; N_FAST], f64) {
    let n = (horizon / step).round() as usize;
    let mut x_s = x_s0;
    let mut hint: Option<([f64; N_MEDIUM], [f64; N_FAST])> = None;
    let mut y_mf = 0.0;
    for _ in 0..n {
        let href = hint.as_ref().map(|(m, f)| (m, f));
        let k1 = slow_rhs(elim, &x_s, u, z, w, href).unwrap();
        let probe = |xs: [f64; N_SLOW]| {
            slow_rhs(elim, &xs, u, z, w, Some((&k1.x_m, &k1.x_f))).unwrap()
        };
        let mut x2 = x_s;
        for i in 0..N_SLOW {
            x2[i] += 0.5 * step * k1.dx_s[i];
        }
        let k2 = probe(x2);
        let mut x3 = x_s;
        for i in 0..N_SLOW {
            x3[i] += 0.5 * step * k2.dx_s[i];
        }
        let k3 = probe(x3);
        let mut x4 = x_s;
        for i in 0..N_SLOW {
            x4[i] += step * k3.dx_s[i];
        }
        let k4 = probe(x4);
        for i in 0..N_SLOW {
            x_s[i] += step / 6.0
                * (k1.dx_s[i] + 2.0 * k2.dx_s[i] + 2.0 * k3.dx_s[i] + k4.dx_s[i]);
        }
        hint = Some((k1.x_m, k1.x_f));
        y_mf = k1.y_mf;
    }
    let terminal = slow_rhs(elim, &x_s, u, z, w, hint.as_ref().map(|(m, f)| (m, f))).unwrap();
    (x_s, terminal.x_m, terminal.x_f, y_mf.max(terminal.y_mf.min(y_mf)).max(terminal.y_mf))
}

/// A 30-minute slow-model trajectory stays within 0.05 degC of the full
/// plant on the building temperature and within 1% of range on the power.
#[test]
fn slow_model_tracks_full_plant_for_thirty_minutes() {
    let p = ModelParameters::default();
    let elim = Eliminator::new(p.clone());
    let x_s0 = nominal_slow();
    let (u, z, w) = nominal_case();

    let start = slow_rhs(&elim, &x_s0, &u, &z, &w, None).unwrap();
    let x0 = embed(&x_s0, &start.x_m, &start.x_f);

    let full = PlantIntegrator::new(p.clone())
        .integrate(&x0, &u, &z, &w, 1800.0, 18000)
        .unwrap();
    let x_full = full.final_state();
    let p_sl_full = full.points.last().unwrap().out.p_sl;

    let (x_s_red, x_m_red, x_f_red, _) = integrate_slow(&elim, x_s0, &u, &z, &w, 1800.0, 10.0);
    let x_red = embed(&x_s_red, &x_m_red, &x_f_red);

    let dt_br = (x_full.t_br() - x_red.t_br()).abs();
    assert!(dt_br < 0.05, "t_br gap after 30 min: {dt_br} degC");

    let term = slow_rhs(&elim, &x_s_red, &u, &z, &w, None).unwrap();
    let range = 195.0;
    assert!(
        (p_sl_full - term.y_mf).abs() / range < 0.01,
        "P_sl gap: full {p_sl_full} vs reduced {}",
        term.y_mf
    );
}

/// Fast states perturbed by 5% of their range fall back onto the
/// quasi-steady manifold within five of the largest fast time constants.
#[test]
fn boundary_layer_recovery() {
    let p = ModelParameters::default();
    let b = OperatingBounds::default();
    let elim = Eliminator::new(p.clone());
    let x_s = nominal_slow();
    let (u, z, w) = nominal_case();

    let eq = slow_rhs(&elim, &x_s, &u, &z, &w, None).unwrap();
    let mut x_f_pert = eq.x_f;
    for (k, &i) in FAST_STATES.iter().enumerate() {
        let range = b.x_max[i] - b.x_min[i];
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        x_f_pert[k] += sign * 0.05 * range;
    }
    // Keep the fuel-cell pressures physical after the kick.
    for (k, &i) in FAST_STATES.iter().enumerate() {
        if i == idx::P_O2 {
            x_f_pert[k] = x_f_pert[k].max(1e-4);
        }
    }

    let x0 = embed(&x_s, &eq.x_m, &x_f_pert);
    let horizon = 5.0 * 6.2208; // five times the largest fast constant
    let traj = PlantIntegrator::new(p.clone())
        .integrate(&x0, &u, &z, &w, 31.1, 311)
        .unwrap();
    assert!(horizon <= 31.2);
    let x_end = traj.final_state();

    // The manifold reference: fast equilibrium at the terminal slow/medium
    // states.
    let x_s_end = project_slow(&x_end);
    let x_m_end = project_medium(&x_end);
    let x_f_star = elim
        .fast_equilibrium(&x_s_end, &x_m_end, &u, &z, &w, Some(&eq.x_f))
        .unwrap();
    let x_f_end = project_fast(&x_end);
    for (k, &i) in FAST_STATES.iter().enumerate() {
        let range = b.x_max[i] - b.x_min[i];
        let gap = (x_f_end[k] - x_f_star[k]).abs() / range;
        assert!(gap < 0.01, "fast state {i} recovered to {gap:.4} of range");
    }
}

/// The linear hourly model reproduces the nonlinear slow model's supplied
/// power within 10% at three nominal operating points.
#[test]
fn linear_model_matches_slow_model_within_ten_percent() {
    let p = ModelParameters::default();
    let elim = Eliminator::new(p.clone());
    let z = IntegerInput::from_array([true, true, true, true]);
    let cases = [
        (
            [0.003, 0.005, 3.0, 90.0, 2.0, 0.5],
            Disturbance {
                t_a: 30.0,
                s_ra: 500.0,
                p_d: 100.0,
                q_other: 20.0,
            },
        ),
        (
            [0.0045, 0.0066911, 3.5714, 110.0, 2.381, 0.2],
            Disturbance {
                t_a: 33.0,
                s_ra: 900.0,
                p_d: 140.0,
                q_other: 25.0,
            },
        ),
        (
            [0.002, 0.004, 2.5, 60.0, 1.8, 0.0],
            Disturbance {
                t_a: 26.0,
                s_ra: 200.0,
                p_d: 70.0,
                q_other: 10.0,
            },
        ),
    ];
    for (u_arr, w) in cases {
        let u = ContinuousInput::from_array(u_arr);
        let x_s = nominal_slow();
        let r = slow_rhs(&elim, &x_s, &u, &z, &w, None).unwrap();
        let (_, lt) = ies_core::longterm::long_term_rhs(
            &[x_s[0], x_s[1], x_s[4]],
            &[u.g_ff, u.g_fm, u.n_ec, u.g_stu, r.out.rec.p_ba],
            &z,
            &ies_core::longterm::LongTermDisturbance {
                t_a: w.t_a,
                s_ra: w.s_ra,
                q_other: w.q_other,
            },
            &p,
        );
        let rel = (lt.p_sl - r.y_mf).abs() / r.y_mf.abs().max(1.0);
        assert!(
            rel < 0.10,
            "linear {} vs nonlinear {} ({:.1}%)",
            lt.p_sl,
            r.y_mf,
            rel * 100.0
        );
    }
}

/// The medium model's output matches the plant output once the fast states
/// sit on their manifold.
#[test]
fn medium_output_substitution() {
    let p = ModelParameters::default();
    let elim = Eliminator::new(p.clone());
    let x_s = nominal_slow();
    let (u, z, w) = nominal_case();
    let eq = slow_rhs(&elim, &x_s, &u, &z, &w, None).unwrap();

    // Perturb the medium states, re-eliminate the fast ones.
    let x_m: [f64; N_MEDIUM] = eq.x_m.map(|v| v * 1.03 + 0.01);
    let m = medium_rhs(&elim, &x_s, &x_m, &u, &z, &w, Some(&eq.x_f)).unwrap();
    let x = embed(&x_s, &x_m, &m.x_f);
    let (_, out) = ies_core::plant_rhs(&x, &u, &z, &w, &p).unwrap();
    assert!((m.y_mf - out.p_sl).abs() < 1e-6);

    let f = fast_rhs(&p, &x_s, &x_m, &m.x_f, &u, &z, &w).unwrap();
    assert!((f.y_mf - out.p_sl).abs() < 1e-12);
}
