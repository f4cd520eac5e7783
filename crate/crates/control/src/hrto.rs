//! Hierarchical real-time optimization baseline: the same hourly scheduler,
//! a steady-state optimizer on the reduced slow subsystem, and a
//! centralized tracking controller on the full nonlinear model.

use ies_core::decomposition::{embed, slow_rhs, Eliminator, FAST_STATES, MEDIUM_STATES, N_SLOW};
use ies_core::state::{ContinuousInput, Disturbance, IntegerInput, OperatingBounds, PlantState, NU, NX};
use ies_core::{plant_rhs, ModelParameters, PlantIntegrator};

use crate::cempc::{ExogenousSource, LongTermEmpc, LongTermStage, ScheduleReference, SolveTelemetry};
use crate::nlp::{solve_nlp, NlpSettings};
use crate::ocp::{OcpProblem, OcpSolution, SolveStatus};
use crate::weights::{ControllerWeights, ZoneSpec};

/// Layer timing of the baseline; the upper layers reuse the composite
/// controller's settings.
#[derive(Debug, Clone, Copy)]
pub struct HrtoConfig {
    pub dt_long: f64,
    pub dt_rto: f64,
    pub dt_tracking: f64,
    pub tracking_horizon: usize,
    pub long_horizon: usize,
    /// Runge-Kutta substeps per tracking step; the five-second step must be
    /// subdivided against the sub-second battery and fuel-cell constants.
    pub tracking_substeps: usize,
}

impl Default for HrtoConfig {
    fn default() -> Self {
        Self {
            dt_long: 3600.0,
            dt_rto: 120.0,
            dt_tracking: 5.0,
            tracking_horizon: 12,
            long_horizon: 24,
            tracking_substeps: 10,
        }
    }
}

/// Steady-state targets exported by the optimization layer.
#[derive(Debug, Clone, Copy)]
pub struct SteadyTargets {
    pub x_ss: PlantState,
    pub u_ss: ContinuousInput,
    pub produced_at: f64,
}

/// Result of one steady-state optimization.
#[derive(Debug, Clone)]
pub struct RtoResult {
    pub targets: SteadyTargets,
    pub solution: OcpSolution,
    pub fallback: bool,
}

/// Steady-state optimizer: picks inputs and a building temperature such
/// that the reduced slow subsystem is at rest (battery and tanks idle,
/// thermal balance closed).
pub struct RtoLayer {
    pub elim: Eliminator,
    pub bounds: OperatingBounds,
    pub weights: ControllerWeights,
    pub settings: NlpSettings,
    prev: Option<SteadyTargets>,
}

/// Decision channels: `G_ab, G_ec, G_stu, G_fm, G_ff, N_ec, t_br`.
const RTO_NU: usize = 7;

impl RtoLayer {
    pub fn new(params: ModelParameters, bounds: OperatingBounds, weights: ControllerWeights) -> Self {
        Self {
            elim: Eliminator::new(params),
            bounds,
            weights,
            settings: NlpSettings {
                max_iter: 40,
                al_rounds: 10,
                tol_grad: 1e-7,
                ..NlpSettings::default()
            },
            prev: None,
        }
    }

    pub fn solve(
        &mut self,
        t: f64,
        x: &PlantState,
        schedule: &ScheduleReference,
        w_held: Disturbance,
        y_sp1: f64,
        t_sp: f64,
    ) -> RtoResult {
        let elim = self.elim.clone();
        let z = schedule.z;
        let bounds = self.bounds.clone();
        let u_range = bounds.u_range();
        let weights = self.weights.clone();
        let x_meas = *x;

        let eval = {
            let elim = elim.clone();
            move |u_dec: &[f64]| -> Result<(ies_core::decomposition::SlowRhs, [f64; N_SLOW]), ies_core::ModelError> {
                let x_s = [
                    x_meas.c_soc(),
                    x_meas.c_sot(),
                    x_meas.c_stc(),
                    x_meas.c_sth(),
                    u_dec[6],
                ];
                let u = crate::cempc::slow::assemble(&u_dec[..6]);
                let r = slow_rhs(&elim, &x_s, &u, &z, &w_held, None)?;
                Ok((r, x_s))
            }
        };

        let eval_cost = eval.clone();
        let stage_cost = move |_s: usize, _x: &[f64], u_dec: &[f64]| {
            let a = &weights.alpha_r;
            match eval_cost(u_dec) {
                Ok((r, _)) => {
                    a[0] * (r.y_mf - y_sp1) * (r.y_mf - y_sp1)
                        + a[1] * (u_dec[6] - t_sp) * (u_dec[6] - t_sp)
                        + a[2] * (u_dec[3] / u_range[1] + u_dec[4] / u_range[0])
                }
                Err(_) => f64::INFINITY,
            }
        };

        let x_lo = bounds.x_min;
        let x_hi = bounds.x_max;
        let eval_path = eval.clone();
        let path = move |_s: usize, _x: &[f64], u_dec: &[f64], out: &mut Vec<f64>| {
            match eval_path(u_dec) {
                Ok((r, _)) => {
                    // Battery idle and thermal balance, as equality pairs in
                    // supply-power units.
                    let balance = r.out.rec.p_ba_d / 195.0;
                    out.push(balance);
                    out.push(-balance);
                    let thermal = r.dx_s[4] * elim.params.C_br / 195.0;
                    out.push(thermal);
                    out.push(-thermal);
                    for (k, &i) in MEDIUM_STATES.iter().enumerate() {
                        let range = x_hi[i] - x_lo[i];
                        out.push((x_lo[i] - r.x_m[k]) / range);
                        out.push((r.x_m[k] - x_hi[i]) / range);
                    }
                    for (k, &i) in FAST_STATES.iter().enumerate() {
                        let range = x_hi[i] - x_lo[i];
                        out.push((x_lo[i] - r.x_f[k]) / range);
                        out.push((r.x_f[k] - x_hi[i]) / range);
                    }
                }
                Err(_) => {
                    // Poison the point: constraint machinery sees a fixed
                    // violated residual.
                    out.extend(std::iter::repeat(1.0).take(4 + 2 * (MEDIUM_STATES.len() + FAST_STATES.len())));
                }
            }
        };

        let gates = [z.z_ma, z.z_ec, true, z.z_ma, z.z_fc, z.z_ec];
        let plant_channel = [2usize, 4, 5, 1, 0, 3];
        let mut ch_lo = [0.0; RTO_NU];
        let mut ch_hi = [0.0; RTO_NU];
        for c in 0..6 {
            if gates[c] {
                ch_lo[c] = bounds.u_min[plant_channel[c]];
                ch_hi[c] = bounds.u_max[plant_channel[c]];
            }
        }
        // The steady state keeps the tanks idle.
        ch_lo[2] = 0.0;
        ch_hi[2] = 0.0;
        ch_lo[6] = bounds.x_min[22];
        ch_hi[6] = bounds.x_max[22];

        let prob = OcpProblem::new(
            1,
            1.0,
            0,
            RTO_NU,
            Vec::new(),
            Box::new(|_s, _x, _u| Ok(Vec::new())),
            Box::new(stage_cost),
        )
        .expect("rto dimensions")
        .with_uniform_bounds(&ch_lo, &ch_hi)
        .expect("rto bounds")
        .with_path(Box::new(path));

        let warm: Option<Vec<f64>> = self.prev.map(|p| {
            let u = p.u_ss.to_array();
            vec![u[2], u[4], 0.0, u[1], u[0], u[3], p.x_ss.t_br()]
        });
        let solution = solve_nlp(&prob, warm.as_deref(), &self.settings);

        let mut fallback = solution.status == SolveStatus::Infeasible
            || solution.max_violation > self.settings.tol_constraint;

        let targets = if fallback {
            None
        } else {
            match eval(&solution.u) {
                Ok((r, x_s)) => {
                    let x_ss = embed(&x_s, &r.x_m, &r.x_f);
                    // Layer contract: exported targets must be a consistent
                    // equilibrium of the full model.
                    let residual_ok = plant_rhs(
                        &x_ss,
                        &crate::cempc::slow::assemble(&solution.u[..6]),
                        &z,
                        &w_held,
                        &elim.params,
                    )
                    .map(|(dx, _)| (0..NX).all(|i| dx[i].abs() < 1e-6))
                    .unwrap_or(false);
                    if residual_ok {
                        Some(SteadyTargets {
                            x_ss,
                            u_ss: crate::cempc::slow::assemble(&solution.u[..6]),
                            produced_at: t,
                        })
                    } else {
                        None
                    }
                }
                Err(_) => None,
            }
        };

        let targets = match targets {
            Some(tg) => {
                self.prev = Some(tg);
                tg
            }
            None => {
                fallback = true;
                self.prev.unwrap_or(SteadyTargets {
                    x_ss: *x,
                    u_ss: ContinuousInput::zeros(),
                    produced_at: t,
                })
            }
        };
        RtoResult {
            targets,
            solution,
            fallback,
        }
    }
}

/// Result of one tracking solve.
#[derive(Debug, Clone)]
pub struct TrackingResult {
    pub u: ContinuousInput,
    pub solution: OcpSolution,
    pub fallback: bool,
}

/// Centralized tracking controller on the full nonlinear model.
pub struct TrackingMpc {
    pub integrator: PlantIntegrator,
    pub bounds: OperatingBounds,
    pub weights: ControllerWeights,
    pub config: HrtoConfig,
    pub settings: NlpSettings,
    prev_u: Option<Vec<f64>>,
    prev_applied: Option<ContinuousInput>,
}

impl TrackingMpc {
    pub fn new(
        params: ModelParameters,
        bounds: OperatingBounds,
        weights: ControllerWeights,
        config: HrtoConfig,
    ) -> Self {
        let substep = config.dt_tracking / config.tracking_substeps as f64;
        Self {
            integrator: PlantIntegrator::new(params).with_step(substep),
            bounds,
            weights,
            config,
            settings: NlpSettings {
                max_iter: 15,
                al_rounds: 2,
                tol_grad: 1e-6,
                ..NlpSettings::default()
            },
            prev_u: None,
            prev_applied: None,
        }
    }

    pub fn solve(
        &mut self,
        _t: f64,
        x: &PlantState,
        targets: &SteadyTargets,
        z: IntegerInput,
        w_held: Disturbance,
        u_prev_applied: Option<ContinuousInput>,
    ) -> TrackingResult {
        let integ = self.integrator.clone();
        let dt = self.config.dt_tracking;
        let bounds = self.bounds.clone();
        let x_range = bounds.x_range();
        let u_range = bounds.u_range();
        let weights = self.weights.clone();
        let x_ss = targets.x_ss;
        let u_ss = targets.u_ss.to_array();

        let transition = {
            let integ = integ.clone();
            move |_s: usize, xv: &[f64], u: &[f64]| {
                let mut arr = [0.0; NX];
                arr.copy_from_slice(xv);
                let mut state = PlantState(arr);
                let uu = ContinuousInput::from_array([u[0], u[1], u[2], u[3], u[4], u[5]]);
                let h = integ.step;
                let steps = (dt / h).round() as usize;
                for _ in 0..steps {
                    state = integ.rk4_step(&state, &uu, &z, &w_held, h)?;
                }
                Ok(state.0.to_vec())
            }
        };

        let stage_cost = move |_s: usize, x_next: &[f64], u: &[f64]| {
            let mut cost = 0.0;
            for i in 0..NX {
                cost += weights.r_t1 * sq((x_next[i] - x_ss[i]) / x_range[i]);
            }
            for c in 0..NU {
                cost += weights.r_t2 * sq((u[c] - u_ss[c]) / u_range[c]);
            }
            cost
        };

        let x_lo = bounds.x_min;
        let x_hi = bounds.x_max;
        let path = move |_s: usize, x_next: &[f64], _u: &[f64], out: &mut Vec<f64>| {
            for i in 0..NX {
                let range = x_hi[i] - x_lo[i];
                out.push((x_lo[i] - x_next[i]) / range);
                out.push((x_next[i] - x_hi[i]) / range);
            }
        };

        let gates = [z.z_fc, z.z_ma, z.z_ma, z.z_ec, z.z_ec, true];
        let mut ch_lo = [0.0; NU];
        let mut ch_hi = [0.0; NU];
        for c in 0..NU {
            if gates[c] {
                ch_lo[c] = bounds.u_min[c];
                ch_hi[c] = bounds.u_max[c];
            }
        }
        let rate_lo: Vec<f64> = (0..NU).map(|c| bounds.du_min[c] * dt).collect();
        let rate_hi: Vec<f64> = (0..NU).map(|c| bounds.du_max[c] * dt).collect();

        let prob = OcpProblem::new(
            self.config.tracking_horizon,
            dt,
            NX,
            NU,
            x.0.to_vec(),
            Box::new(transition),
            Box::new(stage_cost),
        )
        .expect("tracking dimensions")
        .with_uniform_bounds(&ch_lo, &ch_hi)
        .expect("tracking bounds")
        .with_rate_limits(rate_lo, rate_hi, u_prev_applied.map(|u| u.to_array().to_vec()))
        .expect("tracking rate bounds")
        .with_path(Box::new(path));

        let warm = self.prev_u.clone();
        let solution = solve_nlp(&prob, warm.as_deref(), &self.settings);
        let fallback = solution.status == SolveStatus::Infeasible;

        let u = if fallback {
            self.prev_applied.unwrap_or(targets.u_ss)
        } else {
            ContinuousInput::from_array([
                solution.u[0],
                solution.u[1],
                solution.u[2],
                solution.u[3],
                solution.u[4],
                solution.u[5],
            ])
        };
        if !fallback {
            self.prev_u = Some(solution.shifted(NU));
        } else if let Some(w) = self.prev_u.as_mut() {
            *w = crate::cempc::slow::shift_warm(w, NU);
        }
        self.prev_applied = Some(u);
        TrackingResult {
            u,
            solution,
            fallback,
        }
    }
}

/// Per-layer solve counters of the baseline.
#[derive(Debug, Clone, Copy, Default)]
pub struct HrtoCounts {
    pub long: usize,
    pub rto: usize,
    pub tracking: usize,
}

/// The three-layer baseline coordinator; tick it on the one-second grid.
pub struct HrtoCoordinator {
    pub config: HrtoConfig,
    pub long: LongTermEmpc,
    pub rto: RtoLayer,
    pub tracking: TrackingMpc,
    schedule: ScheduleReference,
    targets: Option<SteadyTargets>,
    applied: ContinuousInput,
    exempt_tracking: bool,
    pub counts: HrtoCounts,
    pub telemetry: Vec<SolveTelemetry>,
    pub last_rto: Option<RtoResult>,
    pub last_tracking: Option<TrackingResult>,
}

impl HrtoCoordinator {
    pub fn new(
        params: ModelParameters,
        bounds: OperatingBounds,
        weights: ControllerWeights,
        config: HrtoConfig,
        initial_z: IntegerInput,
    ) -> Self {
        let mut long = LongTermEmpc::new(
            params.clone(),
            bounds.clone(),
            weights.clone(),
            config.long_horizon,
            initial_z,
        );
        long.zone = ZoneSpec::new(24.0, 0.5);
        let rto = RtoLayer::new(params.clone(), bounds.clone(), weights.clone());
        let tracking = TrackingMpc::new(params, bounds, weights, config);
        Self {
            config,
            long,
            rto,
            tracking,
            schedule: ScheduleReference {
                z: initial_z,
                c_soc_ref: 0.5,
                c_sot_ref: 0.5,
                produced_at: -1.0,
            },
            targets: None,
            applied: ContinuousInput::zeros(),
            exempt_tracking: false,
            counts: HrtoCounts::default(),
            telemetry: Vec::new(),
            last_rto: None,
            last_tracking: None,
        }
    }

    fn on_grid(t: f64, dt: f64) -> bool {
        let k = (t / dt).round();
        (t - k * dt).abs() < 1e-6
    }

    /// Runs the layers due at `t`; the building temperature set-point is
    /// tracked exactly (no zone).
    pub fn tick(
        &mut self,
        t: f64,
        x: &PlantState,
        source: &dyn ExogenousSource,
    ) -> (ContinuousInput, IntegerInput) {
        let w_now = source.realized(t);
        let y_sp1 = w_now.p_d;
        let t_sp = source.temperature_setpoint(t);

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
            self.long.zone = ZoneSpec::new(t_sp, 0.5);
            let x_l = [x.c_soc(), x.c_sot(), x.t_br()];
            let r = self.long.solve(t, x_l, &stages);
            self.push_telemetry(t, "hrto_long", &r.solution, r.fallback);
            if r.schedule.z != self.schedule.z {
                self.exempt_tracking = true;
                let g = r.schedule.z;
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
            self.schedule = r.schedule;
            self.counts.long += 1;
        }

        if Self::on_grid(t, self.config.dt_rto) {
            let r = self
                .rto
                .solve(t, x, &self.schedule, w_now, y_sp1, t_sp);
            self.push_telemetry(t, "rto", &r.solution, r.fallback);
            self.targets = Some(r.targets);
            self.counts.rto += 1;
            self.last_rto = Some(r);
        }

        if Self::on_grid(t, self.config.dt_tracking) {
            if let Some(targets) = self.targets {
                let u_prev = if self.exempt_tracking {
                    None
                } else {
                    Some(self.applied)
                };
                self.exempt_tracking = false;
                let r = self
                    .tracking
                    .solve(t, x, &targets, self.schedule.z, w_now, u_prev);
                self.push_telemetry(t, "tracking", &r.solution, r.fallback);
                self.applied = r.u;
                self.counts.tracking += 1;
                self.last_tracking = Some(r);
            }
        }

        (self.applied, self.schedule.z)
    }

    pub fn schedule(&self) -> &ScheduleReference {
        &self.schedule
    }

    pub fn targets(&self) -> Option<&SteadyTargets> {
        self.targets.as_ref()
    }

    fn push_telemetry(&mut self, t: f64, tag: &'static str, sol: &OcpSolution, fb: bool) {
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

fn sq(x: f64) -> f64 {
    x * x
}

/// Convenience wrapper: forecast source over a scenario with day wrap.
pub struct WrappedScenario<'a>(pub &'a ies_core::scenario::ScenarioSpec);

impl ExogenousSource for WrappedScenario<'_> {
    fn realized(&self, t: f64) -> Disturbance {
        self.0
            .realize(t.rem_euclid(86400.0))
            .expect("wrapped time is in range")
    }

    fn forecast(&self, t: f64) -> Disturbance {
        self.0
            .forecast(t.rem_euclid(86400.0))
            .expect("wrapped time is in range")
            .disturbance
    }

    fn temperature_setpoint(&self, t: f64) -> f64 {
        self.0
            .forecast(t.rem_euclid(86400.0))
            .expect("wrapped time is in range")
            .t_br_sp
    }
}
