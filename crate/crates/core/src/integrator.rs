//! Fixed-step explicit Runge-Kutta integration of the plant.

use crate::error::ModelError;
use crate::params::ModelParameters;
use crate::plant::{plant_rhs, PlantOutputs};
use crate::state::{idx, ContinuousInput, Disturbance, IntegerInput, PlantState, NX};

/// Smallest admissible partial pressure (atm) before the soft clamp engages.
pub const PRESSURE_FLOOR: f64 = 1e-9;

/// One logged sample of a trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    /// Time since the start of the integration (s).
    pub t: f64,
    pub x: PlantState,
    pub out: PlantOutputs,
}

/// Result of an integration run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    /// Number of soft pressure clamps applied.
    pub clamp_events: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> PlantState {
        self.points.last().expect("trajectory is never empty").x
    }
}

/// Fixed-step classic Runge-Kutta integrator over the plant model.
///
/// The integrator clamps only physically forced bounds: partial pressures
/// are floored (with a warning) and the capacity states stay in [0, 1].
/// All other bound handling is the controllers' job.
#[derive(Debug, Clone)]
pub struct PlantIntegrator {
    pub params: ModelParameters,
    /// Integration step (s); must divide the horizon and stay at or below
    /// 0.2 s so the fastest time constants remain resolved.
    pub step: f64,
    /// Indices whose derivative is forced to zero (used by the reduced-model
    /// validation to freeze slow states).
    pub frozen: Vec<usize>,
}

impl PlantIntegrator {
    pub fn new(params: ModelParameters) -> Self {
        Self {
            params,
            step: 0.1,
            frozen: Vec::new(),
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        assert!(step > 0.0 && step <= 0.2, "step must be in (0, 0.2] s");
        self.step = step;
        self
    }

    pub fn with_frozen(mut self, frozen: Vec<usize>) -> Self {
        self.frozen = frozen;
        self
    }

    fn rhs(
        &self,
        x: &[f64; NX],
        u: &ContinuousInput,
        z: &IntegerInput,
        w: &Disturbance,
    ) -> Result<[f64; NX], ModelError> {
        let (dx, _) = plant_rhs(&PlantState(*x), u, z, w, &self.params)?;
        let mut d = dx.0;
        for &i in &self.frozen {
            d[i] = 0.0;
        }
        Ok(d)
    }

    /// One RK4 step of length `h`.
    pub fn rk4_step(
        &self,
        x: &PlantState,
        u: &ContinuousInput,
        z: &IntegerInput,
        w: &Disturbance,
        h: f64,
    ) -> Result<PlantState, ModelError> {
        let x0 = x.0;
        let k1 = self.rhs(&x0, u, z, w)?;
        let mut xa = x0;
        for i in 0..NX {
            xa[i] = x0[i] + 0.5 * h * k1[i];
        }
        let k2 = self.rhs(&xa, u, z, w)?;
        for i in 0..NX {
            xa[i] = x0[i] + 0.5 * h * k2[i];
        }
        let k3 = self.rhs(&xa, u, z, w)?;
        for i in 0..NX {
            xa[i] = x0[i] + h * k3[i];
        }
        let k4 = self.rhs(&xa, u, z, w)?;
        let mut xn = x0;
        for i in 0..NX {
            xn[i] = x0[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        Ok(PlantState(xn))
    }

    /// Applies the physical clamps in place; returns the number of events.
    fn clamp(x: &mut PlantState, z: &IntegerInput) -> usize {
        let mut events = 0;
        if z.z_fc {
            for i in [idx::P_O2, idx::P_H2O, idx::P_H2] {
                if x[i] < PRESSURE_FLOOR {
                    log::warn!(
                        "partial pressure state {i} clamped from {} to {PRESSURE_FLOOR}",
                        x[i]
                    );
                    x[i] = PRESSURE_FLOOR;
                    events += 1;
                }
            }
        }
        x[idx::C_SOC] = x[idx::C_SOC].clamp(0.0, 1.0);
        x[idx::C_SOT] = x[idx::C_SOT].clamp(0.0, 1.0);
        events
    }

    /// Integrates with constant `(u, z, w)` over `horizon` seconds, logging
    /// every `log_every` steps (1 = every step).
    pub fn integrate(
        &self,
        x0: &PlantState,
        u: &ContinuousInput,
        z: &IntegerInput,
        w: &Disturbance,
        horizon: f64,
        log_every: usize,
    ) -> Result<Trajectory, ModelError> {
        let n_steps = (horizon / self.step).round() as usize;
        assert!(
            (n_steps as f64 * self.step - horizon).abs() < 1e-9,
            "step must divide the horizon"
        );
        let mut x = *x0;
        let mut points = Vec::with_capacity(n_steps / log_every.max(1) + 1);
        let mut clamp_events = 0;
        let (_, out0) = plant_rhs(&x, u, z, w, &self.params)?;
        points.push(TrajectoryPoint {
            t: 0.0,
            x,
            out: out0,
        });
        for k in 0..n_steps {
            let t_next = (k + 1) as f64 * self.step;
            x = self
                .rk4_step(&x, u, z, w, self.step)
                .map_err(|e| stamp(e, t_next))?;
            clamp_events += Self::clamp(&mut x, z);
            if (k + 1) % log_every.max(1) == 0 || k + 1 == n_steps {
                let (_, out) = plant_rhs(&x, u, z, w, &self.params).map_err(|e| stamp(e, t_next))?;
                points.push(TrajectoryPoint { t: t_next, x, out });
            }
        }
        Ok(Trajectory {
            points,
            clamp_events,
        })
    }
}

fn stamp(e: ModelError, t: f64) -> ModelError {
    match e {
        ModelError::Domain { unit, what } => ModelError::Domain {
            unit,
            what: format!("{what} (at t = {t:.3} s)"),
        },
        ModelError::Capacity { unit, what } => ModelError::Capacity {
            unit,
            what: format!("{what} (at t = {t:.3} s)"),
        },
        other => other,
    }
}
