//! Finite-horizon discrete-time optimal control problems in sequential
//! (single-shooting) form.
//!
//! The decision vector holds the stage inputs; states come from a forward
//! rollout of the caller-supplied transition map. Gradients use forward
//! finite differences with suffix restarts: perturbing a stage input only
//! re-simulates from that stage onward.

use ies_core::ModelError;
use thiserror::Error;

/// Errors raised while building or solving a problem.
#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("model evaluation failed at stage {stage}: {source}")]
    Model {
        stage: usize,
        #[source]
        source: ModelError,
    },
}

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    Infeasible,
}

/// Discrete transition: `(stage, x, u_stage) -> x_next`.
pub type TransitionFn<'a> = Box<dyn Fn(usize, &[f64], &[f64]) -> Result<Vec<f64>, ModelError> + 'a>;
/// Stage cost of `(stage, x_next, u_stage)`.
pub type StageCostFn<'a> = Box<dyn Fn(usize, &[f64], &[f64]) -> f64 + 'a>;
/// Inequality path constraints `g(stage, x_next, u_stage) <= 0`, appended to `out`.
pub type PathFn<'a> = Box<dyn Fn(usize, &[f64], &[f64], &mut Vec<f64>) + 'a>;

/// A finite-horizon problem over `horizon` stages with `nu` inputs each.
pub struct OcpProblem<'a> {
    pub horizon: usize,
    /// Discrete step carried for reference (stretched for the reduced
    /// subsystems); the transition map already encodes it.
    pub dt: f64,
    pub nx: usize,
    pub nu: usize,
    pub x0: Vec<f64>,
    pub transition: TransitionFn<'a>,
    pub stage_cost: StageCostFn<'a>,
    pub path: Option<PathFn<'a>>,
    /// Per-decision-variable box bounds, length `horizon * nu`.
    pub u_min: Vec<f64>,
    pub u_max: Vec<f64>,
    /// Per-channel rate windows over one step (already multiplied by the
    /// sampling time); empty disables rate handling.
    pub rate_min: Vec<f64>,
    pub rate_max: Vec<f64>,
    /// Previously applied input for the first-stage rate constraint; `None`
    /// exempts the first stage (switching instants).
    pub u_prev: Option<Vec<f64>>,
    /// Channels treated as binaries by the mixed-integer strategy.
    pub binary_channels: Vec<usize>,
}

impl<'a> OcpProblem<'a> {
    pub fn new(
        horizon: usize,
        dt: f64,
        nx: usize,
        nu: usize,
        x0: Vec<f64>,
        transition: TransitionFn<'a>,
        stage_cost: StageCostFn<'a>,
    ) -> Result<Self, SolverError> {
        if horizon == 0 {
            return Err(SolverError::Dimension("horizon must be at least 1".into()));
        }
        if !(dt > 0.0) {
            return Err(SolverError::Dimension(format!("step {dt} must be positive")));
        }
        if x0.len() != nx {
            return Err(SolverError::Dimension(format!(
                "x0 has {} entries, expected {nx}",
                x0.len()
            )));
        }
        Ok(Self {
            horizon,
            dt,
            nx,
            nu,
            x0,
            transition,
            stage_cost,
            path: None,
            u_min: vec![f64::NEG_INFINITY; horizon * nu],
            u_max: vec![f64::INFINITY; horizon * nu],
            rate_min: Vec::new(),
            rate_max: Vec::new(),
            u_prev: None,
            binary_channels: Vec::new(),
        })
    }

    pub fn with_bounds(mut self, u_min: Vec<f64>, u_max: Vec<f64>) -> Result<Self, SolverError> {
        let n = self.horizon * self.nu;
        if u_min.len() != n || u_max.len() != n {
            return Err(SolverError::Dimension(format!(
                "bounds length {} / {}, expected {n}",
                u_min.len(),
                u_max.len()
            )));
        }
        self.u_min = u_min;
        self.u_max = u_max;
        Ok(self)
    }

    /// Same bounds at every stage.
    pub fn with_uniform_bounds(self, lo: &[f64], hi: &[f64]) -> Result<Self, SolverError> {
        let horizon = self.horizon;
        let (lo_v, hi_v) = (
            lo.iter().copied().cycle().take(horizon * lo.len()).collect(),
            hi.iter().copied().cycle().take(horizon * hi.len()).collect(),
        );
        self.with_bounds(lo_v, hi_v)
    }

    pub fn with_rate_limits(
        mut self,
        rate_min: Vec<f64>,
        rate_max: Vec<f64>,
        u_prev: Option<Vec<f64>>,
    ) -> Result<Self, SolverError> {
        if rate_min.len() != self.nu || rate_max.len() != self.nu {
            return Err(SolverError::Dimension("rate bounds must have nu entries".into()));
        }
        if let Some(p) = &u_prev {
            if p.len() != self.nu {
                return Err(SolverError::Dimension("u_prev must have nu entries".into()));
            }
        }
        self.rate_min = rate_min;
        self.rate_max = rate_max;
        self.u_prev = u_prev;
        Ok(self)
    }

    pub fn with_path(mut self, path: PathFn<'a>) -> Self {
        self.path = Some(path);
        self
    }

    pub fn with_binaries(mut self, channels: Vec<usize>) -> Self {
        self.binary_channels = channels;
        self
    }

    pub fn n_dec(&self) -> usize {
        self.horizon * self.nu
    }

    pub fn stage_slice<'b>(&self, w: &'b [f64], stage: usize) -> &'b [f64] {
        &w[stage * self.nu..(stage + 1) * self.nu]
    }

    /// Clips a decision vector into the box.
    pub fn project_box(&self, w: &mut [f64]) {
        for i in 0..w.len() {
            w[i] = w[i].clamp(self.u_min[i], self.u_max[i]);
        }
    }

    /// Midpoint of the box, used as the cold start.
    pub fn mid_point(&self) -> Vec<f64> {
        (0..self.n_dec())
            .map(|i| {
                let lo = self.u_min[i];
                let hi = self.u_max[i];
                if lo.is_finite() && hi.is_finite() {
                    0.5 * (lo + hi)
                } else if lo.is_finite() {
                    lo
                } else if hi.is_finite() {
                    hi
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Rate-constraint residuals `g <= 0`, two per (stage transition,
    /// channel).
    pub fn rate_residuals(&self, w: &[f64], out: &mut Vec<f64>) {
        if self.rate_min.is_empty() {
            return;
        }
        for stage in 0..self.horizon {
            let u = self.stage_slice(w, stage);
            let prev: Option<&[f64]> = if stage == 0 {
                self.u_prev.as_deref()
            } else {
                Some(self.stage_slice(w, stage - 1))
            };
            if let Some(prev) = prev {
                for c in 0..self.nu {
                    let du = u[c] - prev[c];
                    out.push(du - self.rate_max[c]);
                    out.push(self.rate_min[c] - du);
                }
            }
        }
    }
}

/// One forward simulation of the problem.
#[derive(Debug, Clone)]
pub struct Rollout {
    /// States `x(0) ..= x(N)`.
    pub states: Vec<Vec<f64>>,
    /// Per-stage costs.
    pub stage_costs: Vec<f64>,
    /// Per-stage path-constraint residuals.
    pub path_residuals: Vec<Vec<f64>>,
    /// First stage whose transition failed, if any.
    pub failed_stage: Option<usize>,
}

impl Rollout {
    pub fn objective(&self) -> f64 {
        if self.failed_stage.is_some() {
            f64::INFINITY
        } else {
            self.stage_costs.iter().sum()
        }
    }
}

/// Rolls the system forward from scratch.
pub fn rollout(prob: &OcpProblem, w: &[f64]) -> Rollout {
    rollout_from(prob, w, 0, None)
}

/// Rolls forward reusing `base` up to (not including) `start`.
pub fn rollout_from(prob: &OcpProblem, w: &[f64], start: usize, base: Option<&Rollout>) -> Rollout {
    let mut states = Vec::with_capacity(prob.horizon + 1);
    let mut stage_costs = Vec::with_capacity(prob.horizon);
    let mut path_residuals = Vec::with_capacity(prob.horizon);
    if let Some(b) = base {
        debug_assert!(start <= prob.horizon && b.states.len() > start);
        states.extend(b.states[..=start].iter().cloned());
        stage_costs.extend_from_slice(&b.stage_costs[..start]);
        path_residuals.extend(b.path_residuals[..start].iter().cloned());
    } else {
        debug_assert_eq!(start, 0);
        states.push(prob.x0.clone());
    }

    for stage in start..prob.horizon {
        let u = prob.stage_slice(w, stage);
        match (prob.transition)(stage, states.last().unwrap(), u) {
            Ok(x_next) => {
                stage_costs.push((prob.stage_cost)(stage, &x_next, u));
                let mut g = Vec::new();
                if let Some(path) = &prob.path {
                    path(stage, &x_next, u, &mut g);
                }
                path_residuals.push(g);
                states.push(x_next);
            }
            Err(_) => {
                return Rollout {
                    states,
                    stage_costs,
                    path_residuals,
                    failed_stage: Some(stage),
                };
            }
        }
    }
    Rollout {
        states,
        stage_costs,
        path_residuals,
        failed_stage: None,
    }
}

/// Solver result: optimal inputs, rolled-out states and bookkeeping.
#[derive(Debug, Clone)]
pub struct OcpSolution {
    /// Flattened inputs, length `horizon * nu`.
    pub u: Vec<f64>,
    /// Rounded binary values per stage, populated by the mixed-integer
    /// strategy.
    pub binaries: Vec<Vec<bool>>,
    /// State trajectory `x(0) ..= x(N)`.
    pub states: Vec<Vec<f64>>,
    /// Realized nonnegative path violations per stage (slack values).
    pub slacks: Vec<Vec<f64>>,
    pub objective: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    /// Largest constraint violation at the solution.
    pub max_violation: f64,
    /// Wall time of the solve (excluded from deterministic artifacts).
    pub wall_time_s: f64,
    /// Merit value per accepted iterate, for regression dumps.
    pub merit_history: Vec<f64>,
}

impl OcpSolution {
    pub fn first_input(&self, nu: usize) -> &[f64] {
        &self.u[..nu]
    }

    /// Shifts the input sequence one stage, repeating the last stage; the
    /// standard infeasibility fallback and warm start.
    pub fn shifted(&self, nu: usize) -> Vec<f64> {
        let n = self.u.len();
        let mut w = Vec::with_capacity(n);
        w.extend_from_slice(&self.u[nu..]);
        w.extend_from_slice(&self.u[n - nu..]);
        w
    }
}
