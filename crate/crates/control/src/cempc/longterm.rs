//! Hourly mixed-integer layer: unit commitment and storage trajectories
//! over a day-scale horizon on the linear model.

use ies_core::longterm::{long_term_input_bounds, long_term_state_bounds, NU_L, NX_L};
use ies_core::state::IntegerInput;
use ies_core::{ModelParameters, OperatingBounds};

use crate::cempc::ScheduleReference;
use crate::minlp::solve_minlp;
use crate::nlp::NlpSettings;
use crate::ocp::{OcpProblem, OcpSolution, SolveStatus};
use crate::weights::{ControllerWeights, ZoneSpec};

/// Exogenous data for one hourly stage.
#[derive(Debug, Clone, Copy)]
pub struct LongTermStage {
    pub t_a: f64,
    pub s_ra: f64,
    pub q_other: f64,
    /// Electric demand forecast (kW), also the tracking set-point.
    pub p_d: f64,
    /// Building temperature set-point (degC).
    pub t_sp: f64,
}

/// Result of one hourly solve.
#[derive(Debug, Clone)]
pub struct LongTermResult {
    pub schedule: ScheduleReference,
    pub solution: OcpSolution,
    pub fallback: bool,
}

/// The hourly scheduler. Decision channels per stage: the five continuous
/// inputs `G_ff, G_fm, N_ec, G_stu, P_ba` followed by the four binaries.
pub struct LongTermEmpc {
    pub params: ModelParameters,
    pub bounds: OperatingBounds,
    pub weights: ControllerWeights,
    pub horizon: usize,
    pub dt: f64,
    pub settings: NlpSettings,
    pub zone: ZoneSpec,
    /// Previous schedule (hysteresis anchor), one row per stage.
    prev_schedule: Vec<Vec<bool>>,
    prev_u: Option<Vec<f64>>,
    prev_result: Option<ScheduleReference>,
}

const NU_DEC: usize = NU_L + 4;

impl LongTermEmpc {
    pub fn new(
        params: ModelParameters,
        bounds: OperatingBounds,
        weights: ControllerWeights,
        horizon: usize,
        initial_z: IntegerInput,
    ) -> Self {
        let z_row: Vec<bool> = initial_z.to_array().to_vec();
        Self {
            params,
            bounds,
            weights,
            horizon,
            dt: 3600.0,
            settings: NlpSettings {
                max_iter: 40,
                al_rounds: 6,
                ..NlpSettings::default()
            },
            zone: ZoneSpec::new(24.0, 0.5),
            prev_schedule: vec![z_row; horizon],
            prev_u: None,
            prev_result: None,
        }
    }

    /// Relaxed-binary evaluation of the linear model outputs.
    fn outputs(p: &ModelParameters, u: &[f64], s_ra: f64) -> (f64, f64, f64, f64) {
        let (g_ff, g_fm, n_ec, g_stu, p_ba) = (u[0], u[1], u[2], u[3], u[4]);
        let (z_ma, z_ec, z_st) = (u[6], u[7], u[8]);
        let g_st = (2.0 * z_st - 1.0) * g_stu;
        let g_all = z_ma * p.G_ab_0 + z_ec * p.G_ec_0 + g_stu;
        let p_sl = p.k_pv * s_ra + p.k_fc * g_ff + p.k_mt * g_fm + p_ba
            - p.k_cp * p.k_ec * n_ec
            - p.k_pmp * g_all;
        let q_sl = p.k_ab * p.k_mt * g_fm + p.k_ec * n_ec + p.k_st * g_st;
        (p_sl, q_sl, g_st, g_all)
    }

    /// Runs the hourly solve and exports the schedule and capacity
    /// references. On infeasibility the previous schedule is held, shifted
    /// one stage.
    pub fn solve(&mut self, t: f64, x_l: [f64; NX_L], stages: &[LongTermStage]) -> LongTermResult {
        assert_eq!(stages.len(), self.horizon, "one exogenous row per stage");
        let p = self.params.clone();
        let (u_lo, u_hi) = long_term_input_bounds(&self.bounds);
        let (x_lo, x_hi) = long_term_state_bounds(&self.bounds);
        let dt = self.dt;
        let zone_delta = self.zone.delta;
        let weights = self.weights.clone();
        let u_range: [f64; NU_L] = std::array::from_fn(|i| u_hi[i] - u_lo[i]);
        let stages_own: Vec<LongTermStage> = stages.to_vec();
        let stages_cost = stages_own.clone();

        // Exact discretization: capacities integrate constant derivatives,
        // the building temperature follows its first-order envelope.
        let a_br = p.U_br / p.C_br;
        let p_t = p.clone();
        let transition = move |stage: usize, x: &[f64], u: &[f64]| {
            let st = &stages_own[stage];
            let (_, q_sl, g_st, _) = Self::outputs(&p_t, u, st.s_ra);
            let c_soc = x[0] + dt * p_t.k_ba * u[4];
            let c_sot = x[1] - dt * g_st / p_t.M_st;
            let t_eq = st.t_a + (st.q_other - q_sl) / p_t.U_br;
            let t_br = t_eq + (x[2] - t_eq) * (-a_br * dt).exp();
            Ok(vec![c_soc, c_sot, t_br])
        };

        let p_c = p.clone();
        let stage_cost = move |stage: usize, x_next: &[f64], u: &[f64]| {
            let st = &stages_cost[stage];
            let (p_sl, _, _, _) = Self::outputs(&p_c, u, st.s_ra);
            let fuel = weights.alpha_l * (u[0] / u_range[0] + u[1] / u_range[1]);
            let balance_slack = st.p_d - p_sl;
            let y_lo = st.t_sp - zone_delta;
            let y_hi = st.t_sp + zone_delta;
            let zone_lo = (y_lo - x_next[2]).max(0.0);
            let zone_hi = (x_next[2] - y_hi).max(0.0);
            fuel + weights.r_l[0] * balance_slack * balance_slack
                + weights.r_l[1] * zone_lo * zone_lo
                + weights.r_l[2] * zone_hi * zone_hi
        };

        // Gating inequalities (bilinear in the relaxation) plus state bounds.
        let gate = [(0usize, 5usize), (1, 6), (2, 7)];
        let u_lo_g = u_lo;
        let u_hi_g = u_hi;
        let path = move |_stage: usize, x_next: &[f64], u: &[f64], out: &mut Vec<f64>| {
            for &(c, zc) in &gate {
                out.push(u[c] - u[zc] * u_hi_g[c]);
                out.push(u[zc] * u_lo_g[c] - u[c]);
            }
            for i in 0..NX_L {
                let range = x_hi[i] - x_lo[i];
                out.push((x_lo[i] - x_next[i]) / range);
                out.push((x_next[i] - x_hi[i]) / range);
            }
        };

        let mut dec_lo = Vec::with_capacity(self.horizon * NU_DEC);
        let mut dec_hi = Vec::with_capacity(self.horizon * NU_DEC);
        for _ in 0..self.horizon {
            dec_lo.extend_from_slice(&[0.0, 0.0, 0.0, u_lo[3], u_lo[4], 0.0, 0.0, 0.0, 0.0]);
            dec_hi.extend_from_slice(&[u_hi[0], u_hi[1], u_hi[2], u_hi[3], u_hi[4], 1.0, 1.0, 1.0, 1.0]);
        }

        let prob = OcpProblem::new(
            self.horizon,
            dt,
            NX_L,
            NU_DEC,
            x_l.to_vec(),
            Box::new(transition),
            Box::new(stage_cost),
        )
        .expect("long-term problem dimensions")
        .with_bounds(dec_lo, dec_hi)
        .expect("long-term bounds")
        .with_path(Box::new(path))
        .with_binaries(vec![5, 6, 7, 8]);

        let warm = self.prev_u.clone();
        let solution = solve_minlp(&prob, warm.as_deref(), &self.prev_schedule, &self.settings);

        let fallback = solution.status == SolveStatus::Infeasible;
        let schedule = if fallback {
            // Hold the previous schedule, shifted one stage.
            let held = self
                .prev_result
                .unwrap_or(ScheduleReference {
                    z: IntegerInput::from_array([
                        self.prev_schedule[0][0],
                        self.prev_schedule[0][1],
                        self.prev_schedule[0][2],
                        self.prev_schedule[0][3],
                    ]),
                    c_soc_ref: x_l[0],
                    c_sot_ref: x_l[1],
                    produced_at: t,
                });
            let mut rotated = self.prev_schedule.clone();
            rotated.rotate_left(1);
            if let Some(last) = rotated.last_mut() {
                *last = self.prev_schedule.last().cloned().unwrap_or_default();
            }
            self.prev_schedule = rotated;
            ScheduleReference {
                produced_at: t,
                ..held
            }
        } else {
            self.prev_schedule = solution.binaries.clone();
            self.prev_u = Some(solution.u.clone());
            let z_row = &solution.binaries[0];
            ScheduleReference {
                z: IntegerInput::from_array([z_row[0], z_row[1], z_row[2], z_row[3]]),
                c_soc_ref: solution.states[1][0],
                c_sot_ref: solution.states[1][1],
                produced_at: t,
            }
        };
        if !fallback {
            self.prev_result = Some(schedule);
        }
        LongTermResult {
            schedule,
            solution,
            fallback,
        }
    }
}
