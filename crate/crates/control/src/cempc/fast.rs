//! Fast layer: re-optimizes the fuel-cell gas flow and compressor
//! frequency on the reduced fast subsystem every two seconds.

use ies_core::decomposition::{
    fast_rhs, separation_eps, InputPartition, FAST_STATES, N_FAST, N_MEDIUM, N_SLOW,
};
use ies_core::state::{Disturbance, IntegerInput, OperatingBounds};
use ies_core::ModelParameters;

use crate::cempc::MediumReference;
use crate::nlp::{solve_nlp, NlpSettings};
use crate::ocp::{OcpProblem, OcpSolution, SolveStatus};
use crate::weights::ControllerWeights;

/// Decision channels `G_ff, N_ec`; plant input positions:
const PLANT_CHANNEL: [usize; 2] = [0, 3];
const NU_DEC: usize = 2;
/// Augmented rollout state: fast states plus the output power.
const NX_AUG: usize = N_FAST + 1;
/// Internal Runge-Kutta substeps per stage; the stiffest fast constants
/// need substeps below the two-second sample.
const SUBSTEPS: usize = 4;

#[derive(Debug, Clone)]
pub struct FastResult {
    /// Applied fast inputs `G_ff, N_ec`.
    pub u_f: [f64; 2],
    pub solution: OcpSolution,
    pub fallback: bool,
}

pub struct FastEmpc {
    pub params: ModelParameters,
    pub bounds: OperatingBounds,
    pub weights: ControllerWeights,
    pub horizon: usize,
    pub dt: f64,
    pub settings: NlpSettings,
    prev_u: Option<Vec<f64>>,
    prev_applied: Option<[f64; 2]>,
}

impl FastEmpc {
    pub fn new(params: ModelParameters, bounds: OperatingBounds, weights: ControllerWeights) -> Self {
        Self {
            params,
            bounds,
            weights,
            horizon: 4,
            dt: 2.0,
            settings: NlpSettings {
                max_iter: 12,
                al_rounds: 2,
                tol_grad: 1e-6,
                ..NlpSettings::default()
            },
            prev_u: None,
            prev_applied: None,
        }
    }

    /// One solve at frozen slow and medium states.
    #[allow(clippy::too_many_arguments)]
    pub fn solve(
        &mut self,
        _t: f64,
        x_s: [f64; N_SLOW],
        x_m: [f64; N_MEDIUM],
        x_f: [f64; N_FAST],
        z: IntegerInput,
        u_s: [f64; 3],
        reference: &MediumReference,
        w_held: Disturbance,
        y_sp1: f64,
        u_prev_applied: Option<[f64; 6]>,
    ) -> FastResult {
        let params = self.params.clone();
        let dt = self.dt;
        let (eps1, _) = separation_eps(&params);
        let weights = self.weights.clone();
        let bounds = self.bounds.clone();
        let u_range = bounds.u_range();
        let x_range = bounds.x_range();

        let transition = {
            let params = params.clone();
            move |_stage: usize, x_aug: &[f64], u_dec: &[f64]| {
                let mut xf = [0.0; N_FAST];
                xf.copy_from_slice(&x_aug[..N_FAST]);
                let u = assemble(&u_s, u_dec);
                let h = dt / eps1 / SUBSTEPS as f64;
                for _ in 0..SUBSTEPS {
                    let k1 = fast_rhs(&params, &x_s, &x_m, &xf, &u, &z, &w_held)?;
                    let x2: [f64; N_FAST] =
                        std::array::from_fn(|i| xf[i] + 0.5 * h * k1.dx_f_stretched[i]);
                    let k2 = fast_rhs(&params, &x_s, &x_m, &x2, &u, &z, &w_held)?;
                    let x3: [f64; N_FAST] =
                        std::array::from_fn(|i| xf[i] + 0.5 * h * k2.dx_f_stretched[i]);
                    let k3 = fast_rhs(&params, &x_s, &x_m, &x3, &u, &z, &w_held)?;
                    let x4: [f64; N_FAST] =
                        std::array::from_fn(|i| xf[i] + h * k3.dx_f_stretched[i]);
                    let k4 = fast_rhs(&params, &x_s, &x_m, &x4, &u, &z, &w_held)?;
                    for i in 0..N_FAST {
                        xf[i] += h / 6.0
                            * (k1.dx_f_stretched[i]
                                + 2.0 * k2.dx_f_stretched[i]
                                + 2.0 * k3.dx_f_stretched[i]
                                + k4.dx_f_stretched[i]);
                    }
                }
                // Output at the end of the stage, where the cost reads it.
                let end = fast_rhs(&params, &x_s, &x_m, &xf, &u, &z, &w_held)?;
                let mut next = vec![0.0; NX_AUG];
                next[..N_FAST].copy_from_slice(&xf);
                next[N_FAST] = end.y_mf;
                Ok(next)
            }
        };

        let mref = *reference;
        let stage_cost = move |_stage: usize, x_next: &[f64], u_dec: &[f64]| {
            let y_mf = x_next[N_FAST];
            let a = &weights.alpha_f;
            let r = &weights.r_f;
            let mut cost = a[0] * sq(y_mf - y_sp1) + a[1] * u_dec[0] / u_range[0];
            for (k, &i) in FAST_STATES.iter().enumerate() {
                cost += r[0] * sq((x_next[k] - mref.x_f[k]) / x_range[i]);
            }
            cost += r[1] * sq((u_dec[0] - mref.u_f[0]) / u_range[0]);
            cost += r[1] * sq((u_dec[1] - mref.u_f[1]) / u_range[3]);
            cost
        };

        let x_lo = bounds.x_min;
        let x_hi = bounds.x_max;
        let path = move |_stage: usize, x_next: &[f64], _u: &[f64], out: &mut Vec<f64>| {
            for (k, &i) in FAST_STATES.iter().enumerate() {
                let range = x_hi[i] - x_lo[i];
                out.push((x_lo[i] - x_next[k]) / range);
                out.push((x_next[k] - x_hi[i]) / range);
            }
        };

        let gates = [z.z_fc, z.z_ec];
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
        x0_aug[..N_FAST].copy_from_slice(&x_f);

        let prob = OcpProblem::new(
            self.horizon,
            dt / eps1,
            NX_AUG,
            NU_DEC,
            x0_aug,
            Box::new(transition),
            Box::new(stage_cost),
        )
        .expect("fast problem dimensions")
        .with_uniform_bounds(&ch_lo, &ch_hi)
        .expect("fast bounds")
        .with_rate_limits(rate_lo, rate_hi, u_prev_dec)
        .expect("fast rate bounds")
        .with_path(Box::new(path));

        let warm = self.prev_u.clone();
        let solution = solve_nlp(&prob, warm.as_deref(), &self.settings);
        let fallback = solution.status == SolveStatus::Infeasible;

        let u_f = if fallback {
            self.prev_applied.unwrap_or(reference.u_f)
        } else {
            [solution.u[0], solution.u[1]]
        };
        if !fallback {
            self.prev_u = Some(solution.shifted(NU_DEC));
        } else if let Some(w) = self.prev_u.as_mut() {
            *w = crate::cempc::slow::shift_warm(w, NU_DEC);
        }
        self.prev_applied = Some(u_f);
        FastResult {
            u_f,
            solution,
            fallback,
        }
    }
}

fn sq(x: f64) -> f64 {
    x * x
}

/// Decision channels plus the held slow inputs and the latest medium input
/// as a plant vector; the medium input is injected by the coordinator via
/// `u_s`-adjacent plumbing, so here only slow and fast channels matter.
fn assemble(u_s: &[f64; 3], u_dec: &[f64]) -> ies_core::ContinuousInput {
    InputPartition::assemble(*u_s, [0.0], [u_dec[0], u_dec[1]])
}
