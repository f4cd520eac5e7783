//! Newton elimination of the medium and fast states.
//!
//! Solves the algebraic equilibrium conditions obtained when the small
//! perturbation parameters go to zero. States of switched-off units are
//! pinned to zero and removed from the system, which keeps the Jacobian
//! nonsingular.

use nalgebra::{DMatrix, DVector};

use crate::decomposition::partition::{
    embed, project_fast, project_medium, FAST_STATES, MEDIUM_STATES, N_FAST, N_MEDIUM, N_SLOW,
};
use crate::error::ModelError;
use crate::params::ModelParameters;
use crate::plant::plant_rhs;
use crate::state::{idx, ContinuousInput, Disturbance, IntegerInput, PlantState};

/// Which reduced system is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scope {
    /// Medium and fast states are unknowns.
    MediumFast,
    /// Only fast states are unknowns; medium states are held.
    FastOnly,
}

/// Newton solver for the quasi-steady medium/fast states.
#[derive(Debug, Clone)]
pub struct Eliminator {
    pub params: ModelParameters,
    /// Infinity-norm residual tolerance on the plant derivative components.
    pub tol: f64,
    pub max_iter: usize,
}

impl Eliminator {
    pub fn new(params: ModelParameters) -> Self {
        Self {
            params,
            tol: 1e-8,
            max_iter: 50,
        }
    }

    /// Solves `f_m = 0, f_f = 0` for `(x_m, x_f)` at frozen slow states,
    /// inputs and disturbances.
    ///
    /// `hint` warm-starts the iteration, typically with the previous
    /// solution along a rollout.
    pub fn medium_fast_equilibrium(
        &self,
        x_s: &[f64; N_SLOW],
        u: &ContinuousInput,
        z: &IntegerInput,
        w: &Disturbance,
        hint: Option<(&[f64; N_MEDIUM], &[f64; N_FAST])>,
    ) -> Result<([f64; N_MEDIUM], [f64; N_FAST]), ModelError> {
        let x_m0;
        let x_f0;
        let (x_m, x_f) = match hint {
            Some((m, f)) => (m, f),
            None => {
                let guess = self.initial_guess(u, z);
                x_m0 = project_medium(&guess);
                x_f0 = project_fast(&guess);
                (&x_m0, &x_f0)
            }
        };
        self.solve(Scope::MediumFast, x_s, x_m, x_f, u, z, w)
    }

    /// Solves `f_f = 0` for `x_f` at frozen slow and medium states.
    pub fn fast_equilibrium(
        &self,
        x_s: &[f64; N_SLOW],
        x_m: &[f64; N_MEDIUM],
        u: &ContinuousInput,
        z: &IntegerInput,
        w: &Disturbance,
        hint: Option<&[f64; N_FAST]>,
    ) -> Result<[f64; N_FAST], ModelError> {
        let x_f0;
        let x_f = match hint {
            Some(f) => f,
            None => {
                x_f0 = project_fast(&self.initial_guess(u, z));
                &x_f0
            }
        };
        let (_, x_f) = self.solve(Scope::FastOnly, x_s, x_m, x_f, u, z, w)?;
        Ok(x_f)
    }

    /// Physically plausible start point built from the unit equilibria.
    pub fn initial_guess(&self, u: &ContinuousInput, z: &IntegerInput) -> PlantState {
        let p = &self.params;
        let mut x = PlantState::zeros();
        x[idx::T_RE] = 12.0;
        if z.z_fc {
            let g_h2 = p.M_ng * u.g_ff;
            let i_f = (g_h2 * p.fu_d / (2.0 * p.K_r)).clamp(1.0, 0.95 * p.I_L);
            let g_h2r = 2.0 * p.K_r * i_f;
            x[idx::I_F] = i_f;
            x[idx::G_H2] = g_h2;
            x[idx::P_O2] = ((g_h2 / p.r_H_O - i_f * p.K_r) / p.K_O2).max(1e-6);
            x[idx::P_H2O] = (g_h2r / p.K_H2O).max(1e-6);
            x[idx::P_H2] = ((g_h2 - g_h2r) / p.K_H2).max(1e-6);
        }
        if z.z_ma {
            let p_mtf = p.k_ma_1 * u.g_fm * u.g_fm + p.k_ma_2 * u.g_fm + p.k_ma_3;
            x[idx::P_MTF] = p_mtf;
            x[idx::T_ABF] = p.k_ma_4 * p_mtf;
            x[idx::T_ABW] = p.k_ma_5 * u.g_ab + p.k_ma_6;
            x[idx::T_ABT] = p.k_ma_7 * 12.0 + p.k_ma_8;
        }
        if z.z_ec {
            x[idx::T_C] = 40.0;
            x[idx::T_CS] = 34.6;
            x[idx::T_CWM] = 30.5;
            x[idx::T_E] = 2.0;
            x[idx::T_ES] = 6.2;
            x[idx::T_EWM] = 9.5;
        }
        x
    }

    /// Unknown state indices for the given scope and unit activation.
    ///
    /// With a stagnant water loop the return-temperature equation is
    /// degenerate (any value is an equilibrium), so `t_re` drops out and
    /// holds its incoming value.
    fn unknowns(scope: Scope, u: &ContinuousInput, z: &IntegerInput) -> Vec<usize> {
        let flowing = u.g_ab + u.g_ec + u.g_stu > 1e-9;
        let active = |i: usize| -> bool {
            match i {
                0..=4 => z.z_fc,
                5..=8 => z.z_ma,
                9..=14 => z.z_ec,
                idx::T_RE => flowing,
                _ => true,
            }
        };
        let mut ids = Vec::new();
        if scope == Scope::MediumFast {
            ids.extend(MEDIUM_STATES.iter().copied().filter(|&i| active(i)));
        }
        ids.extend(FAST_STATES.iter().copied().filter(|&i| active(i)));
        ids
    }

    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        scope: Scope,
        x_s: &[f64; N_SLOW],
        x_m: &[f64; N_MEDIUM],
        x_f: &[f64; N_FAST],
        u: &ContinuousInput,
        z: &IntegerInput,
        w: &Disturbance,
    ) -> Result<([f64; N_MEDIUM], [f64; N_FAST]), ModelError> {
        let ids = Self::unknowns(scope, u, z);
        let n = ids.len();

        // Base state: pinned unit states at zero, held states at their input
        // values.
        let mut base = embed(x_s, x_m, x_f);
        for i in MEDIUM_STATES.iter().chain(&FAST_STATES) {
            if *i != idx::T_RE && !ids.contains(i) && Self::pinned(scope, *i) {
                base[*i] = 0.0;
            }
        }
        if n == 0 {
            return Ok((project_medium(&base), project_fast(&base)));
        }

        let residual = |y: &DVector<f64>| -> Option<DVector<f64>> {
            let mut x = base;
            for (k, &i) in ids.iter().enumerate() {
                x[i] = y[k];
            }
            let (dx, _) = plant_rhs(&x, u, z, w, &self.params).ok()?;
            Some(DVector::from_iterator(n, ids.iter().map(|&i| dx[i])))
        };

        let mut y = DVector::from_iterator(n, ids.iter().map(|&i| base[i]));
        let mut f = residual(&y).ok_or_else(|| ModelError::Convergence {
            residual: f64::INFINITY,
            iterations: 0,
        })?;

        for iter in 0..self.max_iter {
            let norm = f.amax();
            if norm < self.tol {
                let mut x = base;
                for (k, &i) in ids.iter().enumerate() {
                    x[i] = y[k];
                }
                return Ok((project_medium(&x), project_fast(&x)));
            }

            // Central-difference Jacobian.
            let mut jac = DMatrix::zeros(n, n);
            for j in 0..n {
                let h = 1e-6 * y[j].abs().max(1.0);
                let mut yp = y.clone();
                yp[j] += h;
                let mut ym = y.clone();
                ym[j] -= h;
                let (fp, fm) = match (residual(&yp), residual(&ym)) {
                    (Some(a), Some(b)) => (a, b),
                    // One-sided fallback when a probe leaves the domain.
                    _ => match residual(&yp) {
                        Some(a) => ((a.clone() - &f) * 2.0 + &f, f.clone()),
                        None => {
                            let b = residual(&ym).ok_or(ModelError::Convergence {
                                residual: norm,
                                iterations: iter,
                            })?;
                            (f.clone(), (b.clone() - &f) * 2.0 + &f)
                        }
                    },
                };
                for k in 0..n {
                    jac[(k, j)] = (fp[k] - fm[k]) / (2.0 * h);
                }
            }

            let lu = jac.lu();
            let step = lu.solve(&(-&f)).ok_or(ModelError::Convergence {
                residual: norm,
                iterations: iter,
            })?;

            // Damped acceptance on the residual norm.
            let mut t = 1.0;
            let mut accepted = false;
            while t >= 1.0 / 1024.0 {
                let y_try = &y + &step * t;
                if let Some(f_try) = residual(&y_try) {
                    if f_try.amax() < norm * (1.0 - 1e-4 * t) || f_try.amax() < self.tol {
                        y = y_try;
                        f = f_try;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                return Err(ModelError::Convergence {
                    residual: norm,
                    iterations: iter,
                });
            }
        }
        Err(ModelError::Convergence {
            residual: f.amax(),
            iterations: self.max_iter,
        })
    }

    fn pinned(scope: Scope, i: usize) -> bool {
        match scope {
            Scope::MediumFast => true,
            // Fast-only elimination never rewrites medium states.
            Scope::FastOnly => FAST_STATES.contains(&i),
        }
    }

    /// Runs the elimination from several perturbed starts and reports
    /// disagreeing roots, if any. Used to audit the uniqueness assumption.
    pub fn probe_uniqueness(
        &self,
        x_s: &[f64; N_SLOW],
        u: &ContinuousInput,
        z: &IntegerInput,
        w: &Disturbance,
    ) -> Result<Option<(PlantState, PlantState)>, ModelError> {
        let (m0, f0) = self.medium_fast_equilibrium(x_s, u, z, w, None)?;
        for scale in [0.9, 1.1] {
            let m_pert: [f64; N_MEDIUM] = m0.map(|v| v * scale + 0.01);
            let f_pert: [f64; N_FAST] = f0.map(|v| v * scale + 0.01);
            if let Ok((m1, f1)) =
                self.medium_fast_equilibrium(x_s, u, z, w, Some((&m_pert, &f_pert)))
            {
                let diff = m0
                    .iter()
                    .zip(&m1)
                    .chain(f0.iter().zip(&f1))
                    .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
                    .fold(0.0, f64::max);
                if diff > 1e-4 {
                    log::warn!("multiple equilibria detected (relative gap {diff:.3e})");
                    return Ok(Some((embed(x_s, &m0, &f0), embed(x_s, &m1, &f1))));
                }
            }
        }
        Ok(None)
    }
}
