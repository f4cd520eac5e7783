//! Multi-rate coordination of the four layers.
//!
//! Within a tick the execution order is hourly, slow, medium, fast, so
//! downstream layers always consume fresh references. The plant receives
//! the union of the latest applied blocks.

use ies_core::decomposition::{project_fast, project_medium, project_slow, N_MEDIUM, N_SLOW};
use ies_core::state::{ContinuousInput, IntegerInput, OperatingBounds, PlantState};
use ies_core::ModelParameters;

use crate::cempc::fast::{FastEmpc, FastResult};
use crate::cempc::longterm::{LongTermEmpc, LongTermStage};
use crate::cempc::medium::{MediumEmpc, MediumResult};
use crate::cempc::slow::{SlowEmpc, SlowResult};
use crate::cempc::{
    CascadeReference, ExogenousSource, MediumReference, ScheduleReference, SolveTelemetry,
};
use crate::weights::{ControllerWeights, ZoneSpec};

/// Which short-term layers run; disabling layers yields the ablated
/// two-layer scheme used for comparisons.
#[derive(Debug, Clone, Copy)]
pub struct AblationConfig {
    pub medium_enabled: bool,
    pub fast_enabled: bool,
}

impl Default for AblationConfig {
    fn default() -> Self {
        Self {
            medium_enabled: true,
            fast_enabled: true,
        }
    }
}

/// Sampling periods and the hourly horizon.
#[derive(Debug, Clone, Copy)]
pub struct CoordinatorConfig {
    pub dt_long: f64,
    pub dt_slow: f64,
    pub dt_medium: f64,
    pub dt_fast: f64,
    /// Hourly prediction horizon (24 full scale, 6 desk scale).
    pub long_horizon: usize,
    pub zone_delta: f64,
    pub ablation: AblationConfig,
}

impl Default for CoordinatorConfig {
    fn default() -> Self {
        Self {
            dt_long: 3600.0,
            dt_slow: 120.0,
            dt_medium: 8.0,
            dt_fast: 2.0,
            long_horizon: 24,
            zone_delta: 0.5,
            ablation: AblationConfig::default(),
        }
    }
}

/// Per-layer solve counters.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveCounts {
    pub long: usize,
    pub slow: usize,
    pub medium: usize,
    pub fast: usize,
}

pub struct CempcCoordinator {
    pub config: CoordinatorConfig,
    pub long: LongTermEmpc,
    pub slow: SlowEmpc,
    pub medium: MediumEmpc,
    pub fast: FastEmpc,
    schedule: ScheduleReference,
    cascade: Option<CascadeReference>,
    med_ref: Option<MediumReference>,
    applied: ContinuousInput,
    x_s_snapshot: [f64; N_SLOW],
    x_m_snapshot: [f64; N_MEDIUM],
    /// One-sample rate-limit exemption per layer after a switching instant.
    exempt_slow: bool,
    exempt_medium: bool,
    exempt_fast: bool,
    pub counts: SolveCounts,
    pub telemetry: Vec<SolveTelemetry>,
    pub last_slow: Option<SlowResult>,
    pub last_medium: Option<MediumResult>,
    pub last_fast: Option<FastResult>,
}

impl CempcCoordinator {
    pub fn new(
        params: ModelParameters,
        bounds: OperatingBounds,
        weights: ControllerWeights,
        config: CoordinatorConfig,
        initial_z: IntegerInput,
    ) -> Self {
        let mut long = LongTermEmpc::new(
            params.clone(),
            bounds.clone(),
            weights.clone(),
            config.long_horizon,
            initial_z,
        );
        long.zone = ZoneSpec::new(24.0, config.zone_delta);
        let mut slow = SlowEmpc::new(params.clone(), bounds.clone(), weights.clone());
        slow.dt = config.dt_slow;
        let mut medium = MediumEmpc::new(params.clone(), bounds.clone(), weights.clone());
        medium.dt = config.dt_medium;
        let mut fast = FastEmpc::new(params, bounds, weights);
        fast.dt = config.dt_fast;
        Self {
            config,
            long,
            slow,
            medium,
            fast,
            schedule: ScheduleReference {
                z: initial_z,
                c_soc_ref: 0.5,
                c_sot_ref: 0.5,
                produced_at: -1.0,
            },
            cascade: None,
            med_ref: None,
            applied: ContinuousInput::zeros(),
            x_s_snapshot: [0.0; N_SLOW],
            x_m_snapshot: [0.0; N_MEDIUM],
            exempt_slow: false,
            exempt_medium: false,
            exempt_fast: false,
            counts: SolveCounts::default(),
            telemetry: Vec::new(),
            last_slow: None,
            last_medium: None,
            last_fast: None,
        }
    }

    fn on_grid(t: f64, dt: f64) -> bool {
        let k = (t / dt).round();
        (t - k * dt).abs() < 1e-6
    }

    /// Runs the layers due at `t` and returns the inputs to hold until the
    /// next tick. `t` must lie on the fast grid.
    pub fn tick(
        &mut self,
        t: f64,
        x: &PlantState,
        source: &dyn ExogenousSource,
    ) -> (ContinuousInput, IntegerInput) {
        assert!(
            Self::on_grid(t, self.config.dt_fast),
            "tick {t} off the fast grid"
        );
        let w_now = source.realized(t);
        let y_sp1 = w_now.p_d;
        let t_sp = source.temperature_setpoint(t);
        let zone = ZoneSpec::new(t_sp, self.config.zone_delta);

        // Hourly layer.
        if Self::on_grid(t, self.config.dt_long) {
            let stages: Vec<LongTermStage> = (0..self.config.long_horizon)
                .map(|i| {
                    let ti = (t + i as f64 * self.config.dt_long).rem_euclid(86400.0);
                    let f = source.forecast(ti);
                    LongTermStage {
                        t_a: f.t_a,
                        s_ra: f.s_ra,
                        q_other: f.q_other,
                        p_d: f.p_d,
                        t_sp: source.temperature_setpoint(ti),
                    }
                })
                .collect();
            self.long.zone = ZoneSpec::new(t_sp, self.config.zone_delta);
            let x_l = [x.c_soc(), x.c_sot(), x.t_br()];
            let r = self.long.solve(t, x_l, &stages);
            self.push_telemetry(t, "long_term", &r.solution, r.fallback);
            let switched = r.schedule.z != self.schedule.z;
            self.schedule = r.schedule;
            self.counts.long += 1;
            if switched {
                self.exempt_slow = true;
                self.exempt_medium = true;
                self.exempt_fast = true;
                // Gate the applied inputs immediately at the switching
                // instant.
                let g = self.schedule.z;
                let mut u = self.applied.to_array();
                if !g.z_fc {
                    u[0] = 0.0;
                }
                if !g.z_ma {
                    u[1] = 0.0;
                    u[2] = 0.0;
                }
                if !g.z_ec {
                    u[3] = 0.0;
                    u[4] = 0.0;
                }
                self.applied = ContinuousInput::from_array(u);
            }
        }

        // Slow layer.
        if Self::on_grid(t, self.config.dt_slow) {
            self.x_s_snapshot = project_slow(x);
            let u_prev = if self.exempt_slow {
                None
            } else {
                Some(self.applied.to_array())
            };
            self.exempt_slow = false;
            let r = self.slow.solve(
                t,
                self.x_s_snapshot,
                &self.schedule,
                w_now,
                y_sp1,
                zone,
                u_prev,
            );
            self.push_telemetry(t, "slow", &r.solution, r.fallback);
            let mut u = self.applied.to_array();
            u[2] = r.u_s[0];
            u[4] = r.u_s[1];
            u[5] = r.u_s[2];
            self.applied = ContinuousInput::from_array(u);
            self.cascade = Some(r.cascade);
            if !self.config.ablation.medium_enabled {
                // Two-layer scheme: apply the slow layer's medium/fast plan.
                let mut u = self.applied.to_array();
                u[1] = r.cascade.u_m[0];
                self.applied = ContinuousInput::from_array(u);
                self.med_ref = Some(MediumReference {
                    u_f: r.cascade.u_f,
                    x_f: r.cascade.x_f,
                    produced_at: t,
                });
            }
            self.counts.slow += 1;
            self.last_slow = Some(r);
        }

        // Medium layer.
        if self.config.ablation.medium_enabled && Self::on_grid(t, self.config.dt_medium) {
            if let Some(cascade) = self.cascade {
                self.x_m_snapshot = project_medium(x);
                let u_prev = if self.exempt_medium {
                    None
                } else {
                    Some(self.applied.to_array())
                };
                self.exempt_medium = false;
                let r = self.medium.solve(
                    t,
                    self.x_s_snapshot,
                    self.x_m_snapshot,
                    self.schedule.z,
                    &cascade,
                    w_now,
                    y_sp1,
                    u_prev,
                );
                self.push_telemetry(t, "medium", &r.solution, r.fallback);
                let mut u = self.applied.to_array();
                u[1] = r.u_m[0];
                self.applied = ContinuousInput::from_array(u);
                self.med_ref = Some(r.reference);
                self.counts.medium += 1;
                self.last_medium = Some(r);
            }
        }

        // Fast layer.
        if let (Some(cascade), Some(med_ref)) = (self.cascade, self.med_ref) {
            if self.config.ablation.fast_enabled {
                let u_prev = if self.exempt_fast {
                    None
                } else {
                    Some(self.applied.to_array())
                };
                self.exempt_fast = false;
                let r = self.fast.solve(
                    t,
                    self.x_s_snapshot,
                    self.x_m_snapshot,
                    project_fast(x),
                    self.schedule.z,
                    cascade.u_s,
                    &med_ref,
                    w_now,
                    y_sp1,
                    u_prev,
                );
                self.push_telemetry(t, "fast", &r.solution, r.fallback);
                let mut u = self.applied.to_array();
                u[0] = r.u_f[0];
                u[3] = r.u_f[1];
                self.applied = ContinuousInput::from_array(u);
                self.counts.fast += 1;
                self.last_fast = Some(r);
            } else {
                let mut u = self.applied.to_array();
                u[0] = med_ref.u_f[0];
                u[3] = med_ref.u_f[1];
                self.applied = ContinuousInput::from_array(u);
            }
        }

        (self.applied, self.schedule.z)
    }

    pub fn schedule(&self) -> &ScheduleReference {
        &self.schedule
    }

    fn push_telemetry(&mut self, t: f64, tag: &'static str, sol: &crate::ocp::OcpSolution, fb: bool) {
        self.telemetry.push(SolveTelemetry {
            t,
            controller: tag,
            status: sol.status,
            iterations: sol.iterations,
            objective: sol.objective,
            max_violation: sol.max_violation,
            wall_time_s: sol.wall_time_s,
            fallback: fb,
        });
    }
}
