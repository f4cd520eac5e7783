//! Slow layer: optimizes all six continuous inputs on the reduced slow
//! subsystem with zone tracking, applies the slow inputs and exports
//! references for the downstream layers.
//!
//! The rollout state is augmented with the stage outputs and the
//! eliminated medium/fast states so costs and bound penalties can read
//! them without re-eliminating.

use ies_core::decomposition::{
    slow_rhs, Eliminator, InputPartition, FAST_STATES, MEDIUM_STATES, N_FAST, N_MEDIUM, N_SLOW,
    SLOW_STATES,
};
use ies_core::state::{Disturbance, IntegerInput, OperatingBounds};
use ies_core::ModelParameters;

use crate::cempc::{CascadeReference, ScheduleReference};
use crate::nlp::{solve_nlp, NlpSettings};
use crate::ocp::{OcpProblem, OcpSolution, SolveStatus};
use crate::weights::{ControllerWeights, ZoneSpec};

/// Decision channel order: `G_ab, G_ec, G_stu, G_fm, G_ff, N_ec`
/// (slow, medium, fast input blocks). Positions in the plant input vector:
const PLANT_CHANNEL: [usize; 6] = [2, 4, 5, 1, 0, 3];

const NU_DEC: usize = 6;
/// Augmented rollout state: slow states, output power, eliminated medium
/// and fast states.
const NX_AUG: usize = N_SLOW + 1 + N_MEDIUM + N_FAST;

/// Result of one slow solve.
#[derive(Debug, Clone)]
pub struct SlowResult {
    /// Inputs applied to the plant this sample (slow block).
    pub u_s: [f64; 3],
    pub cascade: CascadeReference,
    pub solution: OcpSolution,
    pub fallback: bool,
}

pub struct SlowEmpc {
    pub elim: Eliminator,
    pub bounds: OperatingBounds,
    pub weights: ControllerWeights,
    pub zone: ZoneSpec,
    pub horizon: usize,
    pub dt: f64,
    pub settings: NlpSettings,
    prev_u: Option<Vec<f64>>,
    prev_cascade: Option<CascadeReference>,
}

impl SlowEmpc {
    pub fn new(params: ModelParameters, bounds: OperatingBounds, weights: ControllerWeights) -> Self {
        Self {
            elim: Eliminator::new(params),
            bounds,
            weights,
            zone: ZoneSpec::new(24.0, 0.5),
            horizon: 12,
            dt: 120.0,
            settings: NlpSettings {
                max_iter: 25,
                al_rounds: 4,
                tol_grad: 1e-6,
                ..NlpSettings::default()
            },
            prev_u: None,
            prev_cascade: None,
        }
    }

    /// Gated per-channel box bounds in decision order.
    fn channel_bounds(&self, z: &IntegerInput) -> ([f64; NU_DEC], [f64; NU_DEC]) {
        let gates = [z.z_ma, z.z_ec, true, z.z_ma, z.z_fc, z.z_ec];
        let mut lo = [0.0; NU_DEC];
        let mut hi = [0.0; NU_DEC];
        for c in 0..NU_DEC {
            if gates[c] {
                lo[c] = self.bounds.u_min[PLANT_CHANNEL[c]];
                hi[c] = self.bounds.u_max[PLANT_CHANNEL[c]];
            }
        }
        (lo, hi)
    }

    /// Runs one solve from the measured slow states.
    ///
    /// `u_prev_applied` is the currently applied full input (for rate
    /// limits); pass `None` at switching instants to exempt the first
    /// stage.
    #[allow(clippy::too_many_arguments)]
    pub fn solve(
        &mut self,
        t: f64,
        x_s: [f64; N_SLOW],
        schedule: &ScheduleReference,
        w_held: Disturbance,
        y_sp1: f64,
        zone: ZoneSpec,
        u_prev_applied: Option<[f64; 6]>,
    ) -> SlowResult {
        let z = schedule.z;
        let elim = self.elim.clone();
        let dt = self.dt;
        let weights = self.weights.clone();
        let bounds = self.bounds.clone();
        let u_range = bounds.u_range();
        let x_range = bounds.x_range();

        // One elimination at the measurement warm-starts every stage.
        let hint0 = elim
            .medium_fast_equilibrium(&x_s, &assemble_mid(&bounds, &z), &z, &w_held, None)
            .ok();

        let transition = {
            let elim = elim.clone();
            move |_stage: usize, x_aug: &[f64], u_dec: &[f64]| {
                let mut xs = [0.0; N_SLOW];
                xs.copy_from_slice(&x_aug[..N_SLOW]);
                let u = assemble(u_dec);
                let hint = hint0.as_ref().map(|(m, f)| (m, f));
                let r = slow_rhs(&elim, &xs, &u, &z, &w_held, hint)?;
                let mut next = vec![0.0; NX_AUG];
                for i in 0..N_SLOW {
                    next[i] = xs[i] + dt * r.dx_s[i];
                }
                next[N_SLOW] = r.y_mf;
                next[N_SLOW + 1..N_SLOW + 1 + N_MEDIUM].copy_from_slice(&r.x_m);
                next[N_SLOW + 1 + N_MEDIUM..].copy_from_slice(&r.x_f);
                Ok(next)
            }
        };

        let c_soc_ref = schedule.c_soc_ref;
        let c_sot_ref = schedule.c_sot_ref;
        let stage_cost = move |_stage: usize, x_next: &[f64], u_dec: &[f64]| {
            let y_mf = x_next[N_SLOW];
            let t_br = x_next[4];
            let a = &weights.alpha_s;
            a[0] * (y_mf - y_sp1) * (y_mf - y_sp1)
                + a[1] * zone.distance(t_br) * zone.distance(t_br)
                + a[2] * (u_dec[3] / u_range[1] + u_dec[4] / u_range[0])
                + a[3] * sq((x_next[0] - c_soc_ref) / x_range[16])
                + a[4] * sq((x_next[1] - c_sot_ref) / x_range[18])
        };

        let x_lo = bounds.x_min;
        let x_hi = bounds.x_max;
        let path = move |_stage: usize, x_next: &[f64], _u: &[f64], out: &mut Vec<f64>| {
            let mut push = |plant_i: usize, value: f64| {
                let range = x_hi[plant_i] - x_lo[plant_i];
                out.push((x_lo[plant_i] - value) / range);
                out.push((value - x_hi[plant_i]) / range);
            };
            for (k, &i) in SLOW_STATES.iter().enumerate() {
                push(i, x_next[k]);
            }
            for (k, &i) in MEDIUM_STATES.iter().enumerate() {
                push(i, x_next[N_SLOW + 1 + k]);
            }
            for (k, &i) in FAST_STATES.iter().enumerate() {
                push(i, x_next[N_SLOW + 1 + N_MEDIUM + k]);
            }
        };

        let (ch_lo, ch_hi) = self.channel_bounds(&z);
        let rate: ([f64; NU_DEC], [f64; NU_DEC]) = (
            std::array::from_fn(|c| self.bounds.du_min[PLANT_CHANNEL[c]] * dt),
            std::array::from_fn(|c| self.bounds.du_max[PLANT_CHANNEL[c]] * dt),
        );
        let u_prev_dec = u_prev_applied.map(|u| PLANT_CHANNEL.map(|i| u[i]).to_vec());

        let mut x0_aug = vec![0.0; NX_AUG];
        x0_aug[..N_SLOW].copy_from_slice(&x_s);

        let prob = OcpProblem::new(
            self.horizon,
            dt,
            NX_AUG,
            NU_DEC,
            x0_aug,
            Box::new(transition),
            Box::new(stage_cost),
        )
        .expect("slow problem dimensions")
        .with_uniform_bounds(&ch_lo, &ch_hi)
        .expect("slow bounds")
        .with_rate_limits(rate.0.to_vec(), rate.1.to_vec(), u_prev_dec)
        .expect("slow rate bounds")
        .with_path(Box::new(path));

        let warm = self.prev_u.clone();
        let solution = solve_nlp(&prob, warm.as_deref(), &self.settings);
        let fallback = solution.status == SolveStatus::Infeasible || solution.states.len() < 2;

        if fallback {
            let held = self.prev_cascade.unwrap_or(CascadeReference {
                u_s: [ch_lo[0], ch_lo[1], 0.0],
                u_m: [ch_lo[3]],
                u_f: [ch_lo[4], ch_lo[5]],
                x_m: [0.0; N_MEDIUM],
                x_f: [0.0; N_FAST],
                produced_at: t,
            });
            if let Some(w) = self.prev_u.as_mut() {
                let shifted = shift_warm(w, NU_DEC);
                *w = shifted;
            }
            return SlowResult {
                u_s: held.u_s,
                cascade: CascadeReference {
                    produced_at: t,
                    ..held
                },
                solution,
                fallback: true,
            };
        }

        let first = &solution.u[..NU_DEC];
        let x1 = &solution.states[1];
        let cascade = CascadeReference {
            u_s: [first[0], first[1], first[2]],
            u_m: [first[3]],
            u_f: [first[4], first[5]],
            x_m: std::array::from_fn(|k| x1[N_SLOW + 1 + k]),
            x_f: std::array::from_fn(|k| x1[N_SLOW + 1 + N_MEDIUM + k]),
            produced_at: t,
        };
        self.prev_u = Some(solution.shifted(NU_DEC));
        self.prev_cascade = Some(cascade);
        SlowResult {
            u_s: cascade.u_s,
            cascade,
            solution,
            fallback: false,
        }
    }
}

fn sq(x: f64) -> f64 {
    x * x
}

/// Maps a decision-order stage vector onto the plant input layout.
pub fn assemble(u_dec: &[f64]) -> ies_core::ContinuousInput {
    InputPartition::assemble(
        [u_dec[0], u_dec[1], u_dec[2]],
        [u_dec[3]],
        [u_dec[4], u_dec[5]],
    )
}

fn assemble_mid(bounds: &OperatingBounds, z: &IntegerInput) -> ies_core::ContinuousInput {
    let mut u = [0.0; 6];
    let gates = [z.z_fc, z.z_ma, z.z_ma, z.z_ec, z.z_ec, true];
    for i in 0..6 {
        if gates[i] {
            u[i] = 0.5 * (bounds.u_min[i] + bounds.u_max[i]);
        }
    }
    ies_core::ContinuousInput::from_array(u)
}

/// Shifts a flattened warm start one stage, repeating the last stage.
pub(crate) fn shift_warm(w: &[f64], nu: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(w.len());
    out.extend_from_slice(&w[nu..]);
    out.extend_from_slice(&w[w.len() - nu..]);
    out
}
