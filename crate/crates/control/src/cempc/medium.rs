//! Medium layer: re-optimizes the microturbine fuel flow and the fast
//! inputs on the reduced medium subsystem between slow samples.

use ies_core::decomposition::{
    medium_rhs, separation_eps, Eliminator, InputPartition, FAST_STATES, MEDIUM_STATES, N_FAST,
    N_MEDIUM, N_SLOW,
};
use ies_core::state::{Disturbance, IntegerInput, OperatingBounds};
use ies_core::ModelParameters;

use crate::cempc::{CascadeReference, MediumReference};
use crate::nlp::{solve_nlp, NlpSettings};
use crate::ocp::{OcpProblem, OcpSolution, SolveStatus};
use crate::weights::ControllerWeights;

/// Decision channels `G_fm, G_ff, N_ec`; plant input positions:
const PLANT_CHANNEL: [usize; 3] = [1, 0, 3];
const NU_DEC: usize = 3;
/// Augmented rollout state: medium states, output power, eliminated fast
/// states.
const NX_AUG: usize = N_MEDIUM + 1 + N_FAST;

#[derive(Debug, Clone)]
pub struct MediumResult {
    /// Applied medium input `G_fm`.
    pub u_m: [f64; 1],
    pub reference: MediumReference,
    pub solution: OcpSolution,
    pub fallback: bool,
}

pub struct MediumEmpc {
    pub elim: Eliminator,
    pub bounds: OperatingBounds,
    pub weights: ControllerWeights,
    pub horizon: usize,
    pub dt: f64,
    pub settings: NlpSettings,
    prev_u: Option<Vec<f64>>,
    prev_reference: Option<MediumReference>,
}

impl MediumEmpc {
    pub fn new(params: ModelParameters, bounds: OperatingBounds, weights: ControllerWeights) -> Self {
        Self {
            elim: Eliminator::new(params),
            bounds,
            weights,
            horizon: 12,
            dt: 8.0,
            settings: NlpSettings {
                max_iter: 15,
                al_rounds: 3,
                tol_grad: 1e-6,
                ..NlpSettings::default()
            },
            prev_u: None,
            prev_reference: None,
        }
    }

    /// One solve at frozen slow states.
    #[allow(clippy::too_many_arguments)]
    pub fn solve(
        &mut self,
        t: f64,
        x_s: [f64; N_SLOW],
        x_m: [f64; N_MEDIUM],
        z: IntegerInput,
        cascade: &CascadeReference,
        w_held: Disturbance,
        y_sp1: f64,
        u_prev_applied: Option<[f64; 6]>,
    ) -> MediumResult {
        let elim = self.elim.clone();
        let dt = self.dt;
        let (_, eps2) = separation_eps(&elim.params);
        let weights = self.weights.clone();
        let bounds = self.bounds.clone();
        let u_range = bounds.u_range();
        let x_range = bounds.x_range();
        let u_s = cascade.u_s;
        let hint0 = cascade.x_f;

        let transition = {
            let elim = elim.clone();
            move |_stage: usize, x_aug: &[f64], u_dec: &[f64]| {
                let mut xm = [0.0; N_MEDIUM];
                xm.copy_from_slice(&x_aug[..N_MEDIUM]);
                let u = assemble(&u_s, u_dec);
                // Heun step over the stretched step dt/eps2, equivalent to
                // advancing the physical medium block by dt.
                let k1 = medium_rhs(&elim, &x_s, &xm, &u, &z, &w_held, Some(&hint0))?;
                let mut xm2 = xm;
                for i in 0..N_MEDIUM {
                    xm2[i] += dt / eps2 * k1.dx_m_stretched[i];
                }
                let k2 = medium_rhs(&elim, &x_s, &xm2, &u, &z, &w_held, Some(&k1.x_f))?;
                let mut next = vec![0.0; NX_AUG];
                for i in 0..N_MEDIUM {
                    next[i] = xm[i]
                        + 0.5 * dt / eps2 * (k1.dx_m_stretched[i] + k2.dx_m_stretched[i]);
                }
                next[N_MEDIUM] = k2.y_mf;
                next[N_MEDIUM + 1..].copy_from_slice(&k2.x_f);
                Ok(next)
            }
        };

        let cref = *cascade;
        let stage_cost = move |_stage: usize, x_next: &[f64], u_dec: &[f64]| {
            let y_mf = x_next[N_MEDIUM];
            let a = &weights.alpha_m;
            let r = &weights.r_m;
            let mut cost = a[0] * sq(y_mf - y_sp1)
                + a[1] * (u_dec[0] / u_range[1] + u_dec[1] / u_range[0]);
            for (k, &i) in MEDIUM_STATES.iter().enumerate() {
                cost += r[0] * sq((x_next[k] - cref.x_m[k]) / x_range[i]);
            }
            cost += r[1] * sq((u_dec[0] - cref.u_m[0]) / u_range[1]);
            for (k, &i) in FAST_STATES.iter().enumerate() {
                cost += r[2] * sq((x_next[N_MEDIUM + 1 + k] - cref.x_f[k]) / x_range[i]);
            }
            cost += r[3] * sq((u_dec[1] - cref.u_f[0]) / u_range[0]);
            cost += r[3] * sq((u_dec[2] - cref.u_f[1]) / u_range[3]);
            cost
        };

        let x_lo = bounds.x_min;
        let x_hi = bounds.x_max;
        let path = move |_stage: usize, x_next: &[f64], _u: &[f64], out: &mut Vec<f64>| {
            let mut push = |plant_i: usize, value: f64| {
                let range = x_hi[plant_i] - x_lo[plant_i];
                out.push((x_lo[plant_i] - value) / range);
                out.push((value - x_hi[plant_i]) / range);
            };
            for (k, &i) in MEDIUM_STATES.iter().enumerate() {
                push(i, x_next[k]);
            }
            for (k, &i) in FAST_STATES.iter().enumerate() {
                push(i, x_next[N_MEDIUM + 1 + k]);
            }
        };

        let gates = [z.z_ma, z.z_fc, z.z_ec];
        let mut ch_lo = [0.0; NU_DEC];
        let mut ch_hi = [0.0; NU_DEC];
        for c in 0..NU_DEC {
            if gates[c] {
                ch_lo[c] = bounds.u_min[PLANT_CHANNEL[c]];
                ch_hi[c] = bounds.u_max[PLANT_CHANNEL[c]];
            }
        }
        let rate_lo: Vec<f64> = PLANT_CHANNEL.iter().map(|&i| bounds.du_min[i] * dt).collect();
        let rate_hi: Vec<f64> = PLANT_CHANNEL.iter().map(|&i| bounds.du_max[i] * dt).collect();
        let u_prev_dec = u_prev_applied.map(|u| PLANT_CHANNEL.map(|i| u[i]).to_vec());

        let mut x0_aug = vec![0.0; NX_AUG];
        x0_aug[..N_MEDIUM].copy_from_slice(&x_m);

        let prob = OcpProblem::new(
            self.horizon,
            dt / eps2,
            NX_AUG,
            NU_DEC,
            x0_aug,
            Box::new(transition),
            Box::new(stage_cost),
        )
        .expect("medium problem dimensions")
        .with_uniform_bounds(&ch_lo, &ch_hi)
        .expect("medium bounds")
        .with_rate_limits(rate_lo, rate_hi, u_prev_dec)
        .expect("medium rate bounds")
        .with_path(Box::new(path));

        let warm = self.prev_u.clone();
        let solution = solve_nlp(&prob, warm.as_deref(), &self.settings);
        let fallback = solution.status == SolveStatus::Infeasible || solution.states.len() < 2;

        if fallback {
            let held = self.prev_reference.unwrap_or(MediumReference {
                u_f: cascade.u_f,
                x_f: cascade.x_f,
                produced_at: t,
            });
            if let Some(w) = self.prev_u.as_mut() {
                *w = crate::cempc::slow::shift_warm(w, NU_DEC);
            }
            return MediumResult {
                u_m: cascade.u_m,
                reference: MediumReference {
                    produced_at: t,
                    ..held
                },
                solution,
                fallback: true,
            };
        }

        let first = &solution.u[..NU_DEC];
        let x1 = &solution.states[1];
        let reference = MediumReference {
            u_f: [first[1], first[2]],
            x_f: std::array::from_fn(|k| x1[N_MEDIUM + 1 + k]),
            produced_at: t,
        };
        self.prev_u = Some(solution.shifted(NU_DEC));
        self.prev_reference = Some(reference);
        MediumResult {
            u_m: [first[0]],
            reference,
            solution,
            fallback: false,
        }
    }
}

fn sq(x: f64) -> f64 {
    x * x
}

/// Decision channels plus the held slow inputs as a plant input vector.
pub fn assemble(u_s: &[f64; 3], u_dec: &[f64]) -> ies_core::ContinuousInput {
    InputPartition::assemble(*u_s, [u_dec[0]], [u_dec[1], u_dec[2]])
}
