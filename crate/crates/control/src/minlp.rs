//! Mixed-integer strategy: relax, round with hysteresis, repair.
//!
//! Binary channels are relaxed into [0, 1] and solved as a smooth problem;
//! rounding keeps the previous value inside the dead band [0.35, 0.65] to
//! avoid needless unit cycling. After fixing the binaries the continuous
//! problem is re-solved, and single first-stage flips are probed for a
//! better feasible objective, in deterministic channel order.

use crate::nlp::{solve_nlp, NlpSettings};
use crate::ocp::{OcpProblem, OcpSolution, SolveStatus};

/// Rounding dead band: relaxed values inside keep the previous decision.
pub const HYSTERESIS_LO: f64 = 0.35;
pub const HYSTERESIS_HI: f64 = 0.65;
/// Maximum neighbor patterns probed after the base repair.
pub const MAX_NEIGHBORS: usize = 16;

/// Rounds one relaxed binary with hysteresis against its previous value.
pub fn round_with_hysteresis(relaxed: f64, previous: bool) -> bool {
    if (HYSTERESIS_LO..=HYSTERESIS_HI).contains(&relaxed) {
        previous
    } else {
        relaxed > 0.5
    }
}

/// Solves a problem whose `binary_channels` hold per-stage binaries.
///
/// `prev_binaries` supplies the hysteresis anchor per stage (the previous
/// schedule, shifted); its length must be the horizon.
pub fn solve_minlp(
    prob: &OcpProblem,
    warm: Option<&[f64]>,
    prev_binaries: &[Vec<bool>],
    settings: &NlpSettings,
) -> OcpSolution {
    let nb = prob.binary_channels.len();
    if nb == 0 {
        return solve_nlp(prob, warm, settings);
    }
    assert_eq!(prev_binaries.len(), prob.horizon, "one previous pattern per stage");

    // Continuous relaxation: binaries boxed to [0, 1] (intersected with any
    // tighter caller bounds).
    let relaxed = solve_nlp(prob, warm, settings);

    // Round with hysteresis.
    let mut pattern: Vec<Vec<bool>> = Vec::with_capacity(prob.horizon);
    for stage in 0..prob.horizon {
        let mut row = Vec::with_capacity(nb);
        for (k, &c) in prob.binary_channels.iter().enumerate() {
            let v = relaxed.u[stage * prob.nu + c];
            row.push(round_with_hysteresis(v, prev_binaries[stage][k]));
        }
        pattern.push(row);
    }

    let mut best = repair(prob, &relaxed.u, &pattern, settings);

    // Single-flip neighborhood on the first stage.
    let flips = nb.min(MAX_NEIGHBORS);
    for k in 0..flips {
        let mut alt = pattern.clone();
        alt[0][k] = !alt[0][k];
        let cand = repair(prob, &relaxed.u, &alt, settings);
        let cand_feasible = cand.max_violation <= settings.tol_constraint;
        let best_feasible = best.max_violation <= settings.tol_constraint;
        let better = match (cand_feasible, best_feasible) {
            (true, true) => cand.objective < best.objective,
            (true, false) => true,
            (false, true) => false,
            (false, false) => cand.max_violation < best.max_violation,
        };
        if better {
            best = cand;
        }
    }

    if best.max_violation > settings.tol_constraint {
        best.status = SolveStatus::Infeasible;
    }
    best
}

/// Fixes a binary pattern by collapsing its box bounds and re-solves the
/// continuous problem.
fn repair(
    prob: &OcpProblem,
    warm: &[f64],
    pattern: &[Vec<bool>],
    settings: &NlpSettings,
) -> OcpSolution {
    let mut u_min = prob.u_min.clone();
    let mut u_max = prob.u_max.clone();
    let mut warm_fixed = warm.to_vec();
    for (stage, row) in pattern.iter().enumerate() {
        for (k, &c) in prob.binary_channels.iter().enumerate() {
            let i = stage * prob.nu + c;
            let v = if row[k] { 1.0 } else { 0.0 };
            u_min[i] = v;
            u_max[i] = v;
            warm_fixed[i] = v;
        }
    }
    let fixed = OcpProblem {
        horizon: prob.horizon,
        dt: prob.dt,
        nx: prob.nx,
        nu: prob.nu,
        x0: prob.x0.clone(),
        transition: Box::new(|stage, x, u| (prob.transition)(stage, x, u)),
        stage_cost: Box::new(|stage, x, u| (prob.stage_cost)(stage, x, u)),
        path: prob
            .path
            .as_ref()
            .map(|p| -> crate::ocp::PathFn { Box::new(move |s, x, u, out| p(s, x, u, out)) }),
        u_min,
        u_max,
        rate_min: prob.rate_min.clone(),
        rate_max: prob.rate_max.clone(),
        u_prev: prob.u_prev.clone(),
        binary_channels: Vec::new(),
    };
    let mut sol = solve_nlp(&fixed, Some(&warm_fixed), settings);
    sol.binaries = pattern.to_vec();
    sol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ocp::OcpProblem;
    use approx::assert_relative_eq;

    #[test]
    fn hysteresis_rule() {
        assert!(round_with_hysteresis(0.5, true));
        assert!(!round_with_hysteresis(0.5, false));
        assert!(round_with_hysteresis(0.66, false));
        assert!(!round_with_hysteresis(0.34, true));
    }

    /// Integral relaxation solutions pass through unchanged.
    #[test]
    fn integral_relaxation_matches_nlp() {
        // Binary channel 1 multiplies a bonus that makes z = 1 clearly
        // optimal; the relaxation lands at the bound.
        let build = || {
            OcpProblem::new(
                2,
                1.0,
                1,
                2,
                vec![0.0],
                Box::new(|_, x, u| Ok(vec![x[0] + u[0] * u[1]])),
                Box::new(|_, x_next, u| (x_next[0] - 1.0).powi(2) + 0.01 * u[0] * u[0]),
            )
            .unwrap()
            .with_uniform_bounds(&[0.0, 0.0], &[2.0, 1.0])
            .unwrap()
            .with_binaries(vec![1])
        };
        let prev = vec![vec![true], vec![true]];
        let sol = solve_minlp(&build(), None, &prev, &NlpSettings::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(sol.binaries[0][0]);
        // With z fixed at 1 the continuous answer drives x to 1.
        assert_relative_eq!(sol.states[1][0], 1.0, epsilon = 1e-4);
    }

    /// Two-stage single-binary toy against exhaustive enumeration.
    #[test]
    fn two_stage_toy_matches_enumeration() {
        // Binary z gates a generator with output 1.0; cost = |x - target|^2
        // + startup-ish cost 0.3 z. Demand profile makes z = (1, 0) optimal.
        let target = [1.0, 0.1];
        let build = || {
            OcpProblem::new(
                2,
                1.0,
                1,
                2,
                vec![0.0],
                Box::new(|_, _x, u| Ok(vec![u[0] * u[1]])),
                Box::new(move |stage, x_next, u| {
                    (x_next[0] - target[stage]).powi(2) + 0.3 * u[1]
                }),
            )
            .unwrap()
            .with_uniform_bounds(&[0.0, 0.0], &[1.5, 1.0])
            .unwrap()
            .with_binaries(vec![1])
        };

        // Brute force over the four patterns with the continuous part solved
        // per pattern.
        let mut best_obj = f64::INFINITY;
        let mut best_pattern = (false, false);
        for z0 in [false, true] {
            for z1 in [false, true] {
                let mut obj = 0.0;
                for (stage, z) in [(0, z0), (1, z1)] {
                    let zf = if z { 1.0 } else { 0.0 };
                    // Optimal u given z: u = clamp(target, 0, 1.5) when on.
                    let x = zf * target[stage].clamp(0.0, 1.5);
                    obj += (x - target[stage]).powi(2) + 0.3 * zf;
                }
                if obj < best_obj {
                    best_obj = obj;
                    best_pattern = (z0, z1);
                }
            }
        }
        assert_eq!(best_pattern, (true, false));

        let prev = vec![vec![false], vec![false]];
        let sol = solve_minlp(&build(), None, &prev, &NlpSettings::default());
        assert_eq!(
            (sol.binaries[0][0], sol.binaries[1][0]),
            best_pattern,
            "solver pattern vs enumeration"
        );
        assert!((sol.objective - best_obj).abs() < 1e-4);
    }
}
