//! Smooth solver for the sequential optimal control problems.
//!
//! Projected quasi-Newton (BFGS) over the input box combined with an
//! augmented-Lagrangian treatment of rate and path constraints: the
//! quadratic penalty weight doubles between rounds until the violation
//! falls below tolerance.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::ocp::{rollout, rollout_from, OcpProblem, OcpSolution, Rollout, SolveStatus};

/// Solver settings; the defaults fit the receding-horizon problems here.
#[derive(Debug, Clone)]
pub struct NlpSettings {
    /// Inner quasi-Newton iterations per penalty round.
    pub max_iter: usize,
    /// Multiplier/penalty rounds.
    pub al_rounds: usize,
    /// Projected-gradient stopping tolerance.
    pub tol_grad: f64,
    /// Constraint violation target.
    pub tol_constraint: f64,
    /// Initial quadratic penalty weight.
    pub penalty0: f64,
    /// Relative forward-difference step.
    pub fd_step: f64,
}

impl Default for NlpSettings {
    fn default() -> Self {
        Self {
            max_iter: 60,
            al_rounds: 8,
            tol_grad: 1e-7,
            tol_constraint: 1e-6,
            penalty0: 10.0,
            fd_step: 1e-6,
        }
    }
}

/// Per-iterate record for the optional solver dump.
#[derive(Debug, Clone, serde::Serialize)]
pub struct IterateRecord {
    pub round: usize,
    pub iteration: usize,
    pub merit: f64,
    pub objective: f64,
    pub step_length: f64,
}

/// Rockafellar augmented-Lagrangian term for one inequality `g <= 0`.
fn al_term(g: f64, lambda: f64, mu: f64) -> f64 {
    let t = lambda + mu * g;
    if t > 0.0 {
        (t * t - lambda * lambda) / (2.0 * mu)
    } else {
        -lambda * lambda / (2.0 * mu)
    }
}

/// Flattened constraint vector: per-stage path residuals then rate
/// residuals.
fn constraints(prob: &OcpProblem, w: &[f64], roll: &Rollout, out: &mut Vec<f64>) {
    out.clear();
    for g in &roll.path_residuals {
        out.extend_from_slice(g);
    }
    prob.rate_residuals(w, out);
}

struct MeritEval {
    merit: f64,
    objective: f64,
    roll: Rollout,
}

fn eval_merit(
    prob: &OcpProblem,
    w: &[f64],
    lambda: &[f64],
    mu: f64,
    from: Option<(usize, &Rollout)>,
    scratch: &mut Vec<f64>,
) -> MeritEval {
    let roll = match from {
        Some((stage, base)) => rollout_from(prob, w, stage, Some(base)),
        None => rollout(prob, w),
    };
    if roll.failed_stage.is_some() {
        return MeritEval {
            merit: f64::INFINITY,
            objective: f64::INFINITY,
            roll,
        };
    }
    let objective = roll.objective();
    constraints(prob, w, &roll, scratch);
    let mut merit = objective;
    if !scratch.is_empty() {
        debug_assert_eq!(scratch.len(), lambda.len());
        for (g, l) in scratch.iter().zip(lambda) {
            merit += al_term(*g, *l, mu);
        }
    }
    MeritEval {
        merit,
        objective,
        roll,
    }
}

/// Forward-difference merit gradient with suffix restarts.
fn fd_gradient(
    prob: &OcpProblem,
    w: &[f64],
    base: &MeritEval,
    lambda: &[f64],
    mu: f64,
    fd_step: f64,
    scratch: &mut Vec<f64>,
) -> DVector<f64> {
    let n = w.len();
    let mut grad = DVector::zeros(n);
    let mut w_try = w.to_vec();
    for i in 0..n {
        let stage = i / prob.nu;
        let h = fd_step * w[i].abs().max(1.0);
        w_try[i] = w[i] + h;
        let plus = eval_merit(prob, &w_try, lambda, mu, Some((stage, &base.roll)), scratch);
        if plus.merit.is_finite() {
            grad[i] = (plus.merit - base.merit) / h;
        } else {
            // Backward difference when the forward probe leaves the domain.
            w_try[i] = w[i] - h;
            let minus = eval_merit(prob, &w_try, lambda, mu, Some((stage, &base.roll)), scratch);
            grad[i] = if minus.merit.is_finite() {
                (base.merit - minus.merit) / h
            } else {
                0.0
            };
        }
        w_try[i] = w[i];
    }
    grad
}

/// Solves the smooth problem; binaries must be absent (the mixed-integer
/// strategy handles them).
pub fn solve_nlp(prob: &OcpProblem, warm: Option<&[f64]>, settings: &NlpSettings) -> OcpSolution {
    solve_nlp_traced(prob, warm, settings, &mut Vec::new())
}

/// Same as [`solve_nlp`] but records accepted iterates for the debug dump.
pub fn solve_nlp_traced(
    prob: &OcpProblem,
    warm: Option<&[f64]>,
    settings: &NlpSettings,
    trace: &mut Vec<IterateRecord>,
) -> OcpSolution {
    let start_time = Instant::now();
    let n = prob.n_dec();
    let mut w = warm.map(|w| w.to_vec()).unwrap_or_else(|| prob.mid_point());
    assert_eq!(w.len(), n, "warm start has wrong length");
    prob.project_box(&mut w);

    let mut scratch = Vec::new();
    // Constraint count from a first rollout.
    let probe = rollout(prob, &w);
    constraints(prob, &w, &probe, &mut scratch);
    let n_con = scratch.len();
    let mut lambda = vec![0.0; n_con];
    let mut mu = settings.penalty0;

    let mut merit_history = Vec::new();
    let mut total_iters = 0usize;
    let mut prev_viol = f64::INFINITY;

    for round in 0..settings.al_rounds.max(1) {
        let mut eval = eval_merit(prob, &w, &lambda, mu, None, &mut scratch);
        if !eval.merit.is_finite() {
            // Infeasible start: fall back to the box midpoint once.
            w = prob.mid_point();
            eval = eval_merit(prob, &w, &lambda, mu, None, &mut scratch);
            if !eval.merit.is_finite() {
                return OcpSolution {
                    u: w,
                    binaries: Vec::new(),
                    states: eval.roll.states,
                    slacks: Vec::new(),
                    objective: f64::INFINITY,
                    status: SolveStatus::Infeasible,
                    iterations: total_iters,
                    max_violation: f64::INFINITY,
                    wall_time_s: start_time.elapsed().as_secs_f64(),
                    merit_history,
                };
            }
        }
        let mut grad = fd_gradient(prob, &w, &eval, &lambda, mu, settings.fd_step, &mut scratch);
        let mut h_inv: DMatrix<f64> = DMatrix::identity(n, n);
        let mut reset_used = false;
        let mut stagnant = 0usize;
        merit_history.push(eval.merit);

        for _iter in 0..settings.max_iter {
            // Projected-gradient optimality measure.
            let mut pg: f64 = 0.0;
            for i in 0..n {
                let stepped = (w[i] - grad[i]).clamp(prob.u_min[i], prob.u_max[i]);
                pg = pg.max((stepped - w[i]).abs());
            }

            if pg < settings.tol_grad {
                break;
            }

            // Active bounds: at the box edge with the gradient pushing out.
            let eps_act = 1e-12;
            let active: Vec<bool> = (0..n)
                .map(|i| {
                    (w[i] <= prob.u_min[i] + eps_act && grad[i] > 0.0)
                        || (w[i] >= prob.u_max[i] - eps_act && grad[i] < 0.0)
                })
                .collect();

            let mut g_free = grad.clone();
            for i in 0..n {
                if active[i] {
                    g_free[i] = 0.0;
                }
            }
            let mut dir = -(&h_inv * &g_free);
            for i in 0..n {
                if active[i] {
                    dir[i] = 0.0;
                }
            }
            let slope = dir.dot(&grad);
            if slope >= 0.0 {
                h_inv = DMatrix::identity(n, n);
                dir = -g_free.clone();
            }

            // Backtracking line search on the projected point.
            let mut t = 1.0;
            let mut accepted = None;
            while t >= 1e-12 {
                let mut w_try: Vec<f64> = (0..n).map(|i| w[i] + t * dir[i]).collect();
                prob.project_box(&mut w_try);
                let step: Vec<f64> = (0..n).map(|i| w_try[i] - w[i]).collect();
                if step.iter().all(|&s| s == 0.0) {
                    break;
                }
                let try_eval = eval_merit(prob, &w_try, &lambda, mu, None, &mut scratch);
                if try_eval.merit.is_finite() {
                    let pred: f64 = step.iter().zip(grad.iter()).map(|(s, g)| s * g).sum();
                    if try_eval.merit <= eval.merit + 1e-4 * pred.min(0.0) {
                        accepted = Some((w_try, try_eval, t));
                        break;
                    }
                }
                t *= 0.5;
            }
            let Some((w_new, eval_new, t_used)) = accepted else {
                // One restart with fresh curvature before giving up.
                if reset_used {
                    break;
                }
                reset_used = true;
                h_inv = DMatrix::identity(n, n);
                continue;
            };

            total_iters += 1;
            let grad_new =
                fd_gradient(prob, &w_new, &eval_new, &lambda, mu, settings.fd_step, &mut scratch);

            // BFGS update of the inverse Hessian.
            let s = DVector::from_iterator(n, (0..n).map(|i| w_new[i] - w[i]));
            let yv = &grad_new - &grad;
            let sy = s.dot(&yv);
            if sy > 1e-10 * s.norm() * yv.norm() {
                let rho = 1.0 / sy;
                let hy = &h_inv * &yv;
                let yhy = yv.dot(&hy);
                // H <- H - rho (s yH' + Hy s') + rho^2 s s' (y'Hy) + rho s s'
                let ss = &s * s.transpose();
                let s_hy = &s * hy.transpose();
                h_inv = &h_inv - (&s_hy + s_hy.transpose()) * rho
                    + &ss * (rho * rho * yhy + rho);
            }

            let improvement = eval.merit - eval_new.merit;
            w = w_new;
            eval = eval_new;
            grad = grad_new;
            merit_history.push(eval.merit);
            if improvement <= 1e-14 * (1.0 + eval.merit.abs()) {
                stagnant += 1;
                if stagnant >= 3 {
                    break;
                }
            } else {
                stagnant = 0;
            }
            trace.push(IterateRecord {
                round,
                iteration: total_iters,
                merit: eval.merit,
                objective: eval.objective,
                step_length: t_used,
            });
        }

        // Constraint check and multiplier update.
        constraints(prob, &w, &eval.roll, &mut scratch);
        let viol = scratch.iter().fold(0.0f64, |m, &g| m.max(g));
        if n_con == 0 || viol <= settings.tol_constraint {
            let final_eval = eval_merit(prob, &w, &lambda, mu, None, &mut scratch);
            constraints(prob, &w, &final_eval.roll, &mut scratch);
            let slacks = split_slacks(prob, &final_eval.roll, &scratch);
            let viol_f = scratch.iter().fold(0.0f64, |m, &g| m.max(g)).max(0.0);
            return OcpSolution {
                u: w,
                binaries: Vec::new(),
                states: final_eval.roll.states,
                slacks,
                objective: final_eval.objective,
                status: SolveStatus::Optimal,
                iterations: total_iters,
                max_violation: viol_f,
                wall_time_s: start_time.elapsed().as_secs_f64(),
                merit_history,
            };
        }
        for (l, &g) in lambda.iter_mut().zip(scratch.iter()) {
            *l = (*l + mu * g).max(0.0);
        }
        if viol > 0.25 * prev_viol {
            mu *= 2.0;
        }
        prev_viol = viol;
    }

    let final_eval = eval_merit(prob, &w, &lambda, mu, None, &mut scratch);
    constraints(prob, &w, &final_eval.roll, &mut scratch);
    let viol = scratch.iter().fold(0.0f64, |m, &g| m.max(g)).max(0.0);
    let slacks = split_slacks(prob, &final_eval.roll, &scratch);
    OcpSolution {
        u: w,
        binaries: Vec::new(),
        states: final_eval.roll.states,
        slacks,
        objective: final_eval.objective,
        status: SolveStatus::MaxIter,
        iterations: total_iters,
        max_violation: viol,
        wall_time_s: start_time.elapsed().as_secs_f64(),
        merit_history,
    }
}

/// Nonnegative per-stage path violations (the realized slack values).
fn split_slacks(_prob: &OcpProblem, roll: &Rollout, _flat: &[f64]) -> Vec<Vec<f64>> {
    roll.path_residuals
        .iter()
        .map(|g| g.iter().map(|&v| v.max(0.0)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ocp::OcpProblem;
    use approx::assert_relative_eq;

    /// One stage, one input, pure quadratic: the solver must return the
    /// analytic minimizer.
    #[test]
    fn one_dimensional_quadratic() {
        let prob = OcpProblem::new(
            1,
            1.0,
            1,
            1,
            vec![0.0],
            Box::new(|_, _x, u| Ok(vec![u[0]])),
            Box::new(|_, _x, u| (u[0] - 3.0) * (u[0] - 3.0)),
        )
        .unwrap()
        .with_uniform_bounds(&[-10.0], &[10.0])
        .unwrap();
        let sol = solve_nlp(&prob, None, &NlpSettings::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_relative_eq!(sol.u[0], 3.0, epsilon = 1e-6);
    }

    /// Feasible warm start at the optimum terminates immediately.
    #[test]
    fn warm_start_at_optimum_converges_in_two_iterations() {
        let prob = OcpProblem::new(
            4,
            1.0,
            1,
            1,
            vec![1.0],
            Box::new(|_, x, u| Ok(vec![0.5 * x[0] + u[0]])),
            Box::new(|_, x, u| x[0] * x[0] + u[0] * u[0]),
        )
        .unwrap()
        .with_uniform_bounds(&[-5.0], &[5.0])
        .unwrap();
        let cold = solve_nlp(&prob, None, &NlpSettings::default());
        assert_eq!(cold.status, SolveStatus::Optimal);
        let warm = solve_nlp(&prob, Some(&cold.u), &NlpSettings::default());
        assert!(warm.iterations <= 2, "warm iterations = {}", warm.iterations);
        assert_relative_eq!(warm.objective, cold.objective, max_relative = 1e-8);
    }

    /// Rosenbrock in a box, smoke test of the unconstrained path.
    #[test]
    fn rosenbrock_on_a_box() {
        let prob = OcpProblem::new(
            1,
            1.0,
            2,
            2,
            vec![0.0, 0.0],
            Box::new(|_, _x, u| Ok(vec![u[0], u[1]])),
            Box::new(|_, _x, u| {
                let (a, b) = (u[0], u[1]);
                (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a)
            }),
        )
        .unwrap()
        .with_uniform_bounds(&[-2.0, -2.0], &[2.0, 2.0])
        .unwrap();
        // The valley curvature (~800) demands a finer forward probe than
        // the production default to resolve the floor of the merit.
        let settings = NlpSettings {
            max_iter: 400,
            fd_step: 1e-8,
            ..NlpSettings::default()
        };
        let sol = solve_nlp(&prob, Some(&[-1.2, 1.0]), &settings);
        assert!(
            (sol.u[0] - 1.0).abs() < 1e-4 && (sol.u[1] - 1.0).abs() < 1e-4,
            "minimizer {:?}",
            sol.u
        );
    }

    /// The merit value never increases across accepted iterates.
    #[test]
    fn merit_is_monotone_within_a_round() {
        let prob = OcpProblem::new(
            6,
            1.0,
            1,
            1,
            vec![2.0],
            Box::new(|_, x, u| Ok(vec![0.9 * x[0] + u[0]])),
            Box::new(|_, x, u| x[0] * x[0] + 0.3 * u[0] * u[0]),
        )
        .unwrap()
        .with_uniform_bounds(&[-1.0], &[1.0])
        .unwrap();
        let sol = solve_nlp(&prob, None, &NlpSettings::default());
        for pair in sol.merit_history.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "merit rose: {pair:?}");
        }
    }

    /// Identical problem and warm start give bitwise-identical results.
    #[test]
    fn deterministic_resolve() {
        let build = || {
            OcpProblem::new(
                5,
                1.0,
                1,
                1,
                vec![1.5],
                Box::new(|_, x, u| Ok(vec![0.8 * x[0] + 0.5 * u[0]])),
                Box::new(|_, x, u| x[0] * x[0] + 0.1 * (u[0] - 0.2) * (u[0] - 0.2)),
            )
            .unwrap()
            .with_uniform_bounds(&[-2.0], &[2.0])
            .unwrap()
            .with_rate_limits(vec![-0.5], vec![0.5], Some(vec![0.0]))
            .unwrap()
        };
        let a = solve_nlp(&build(), Some(&[0.1; 5]), &NlpSettings::default());
        let b = solve_nlp(&build(), Some(&[0.1; 5]), &NlpSettings::default());
        assert_eq!(a.u.len(), b.u.len());
        for (x, y) in a.u.iter().zip(&b.u) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }

    /// An active rate limit saturates exactly at the bound.
    #[test]
    fn rate_limit_saturates_at_bound() {
        // Track a far-away reference under a tight rate budget: the
        // unconstrained answer clipped to the rate chain is optimal.
        let prob = OcpProblem::new(
            3,
            1.0,
            1,
            1,
            vec![0.0],
            Box::new(|_, _x, u| Ok(vec![u[0]])),
            Box::new(|_, _x, u| (u[0] - 10.0) * (u[0] - 10.0)),
        )
        .unwrap()
        .with_uniform_bounds(&[-20.0], &[20.0])
        .unwrap()
        .with_rate_limits(vec![-1.0], vec![1.0], Some(vec![0.0]))
        .unwrap();
        let settings = NlpSettings {
            al_rounds: 25,
            ..NlpSettings::default()
        };
        let sol = solve_nlp(&prob, None, &settings);
        // Clipped-chain oracle: 1, 2, 3.
        assert!((sol.u[0] - 1.0).abs() < 1e-4, "u = {:?}", sol.u);
        assert!((sol.u[1] - 2.0).abs() < 1e-4);
        assert!((sol.u[2] - 3.0).abs() < 1e-4);
        assert!((sol.u[1] - sol.u[0] - 1.0).abs() < 1e-5, "rate not saturated");
        assert!(sol.max_violation <= 1e-6);
    }

    /// Infeasible equality demands leave a positive penalty floor that the
    /// solver reports as violation.
    #[test]
    fn impossible_path_constraint_reports_violation() {
        let prob = OcpProblem::new(
            2,
            1.0,
            1,
            1,
            vec![0.0],
            Box::new(|_, _x, u| Ok(vec![u[0]])),
            Box::new(|_, _x, u| u[0] * u[0]),
        )
        .unwrap()
        .with_uniform_bounds(&[0.0], &[1.0])
        .unwrap()
        // Requires u >= 2, beyond the box.
        .with_path(Box::new(|_, _x, u, out| out.push(2.0 - u[0])));
        let sol = solve_nlp(&prob, None, &NlpSettings::default());
        assert_eq!(sol.status, SolveStatus::MaxIter);
        assert!(sol.max_violation >= 1.0 - 1e-9, "viol = {}", sol.max_violation);
        // The box itself is always honored.
        assert!(sol.u.iter().all(|&u| (0.0..=1.0).contains(&u)));
    }
}
