//! Experiment scenarios: hourly forecasts and realized curves with bounded
//! random oscillation.
//!
//! The realized curves multiply the forecast by `1 + eta` with `eta` drawn
//! uniformly per 10-minute block and channel from a SplitMix64 stream, so a
//! seed fully determines every curve.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::state::Disturbance;

/// Seconds per realized-curve block.
pub const REALIZED_BLOCK_S: f64 = 600.0;
/// Seconds per forecast anchor.
pub const ANCHOR_SPACING_S: f64 = 3600.0;
/// Length of the scenario day.
pub const DAY_S: f64 = 86400.0;

/// SplitMix64 output for one 64-bit input; the fixed published mixing
/// function keeps curves reproducible across implementations.
pub fn splitmix64(state: u64) -> u64 {
    let mut x = state.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

/// Uniform draw in [-1, 1) keyed by (seed, block, channel).
fn signed_unit(seed: u64, block: u64, channel: u64) -> f64 {
    let h = splitmix64(seed ^ splitmix64(block.wrapping_mul(8).wrapping_add(channel)));
    let u = (h >> 11) as f64 / (1u64 << 53) as f64; // [0, 1)
    2.0 * u - 1.0
}

/// Forecast and set-point values at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastPoint {
    pub disturbance: Disturbance,
    /// Building temperature set-point (degC).
    pub t_br_sp: f64,
}

/// One experiment scenario: hourly anchors, oscillation band and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: u8,
    /// Hourly ambient temperature anchors (degC).
    pub t_a: [f64; 24],
    /// Hourly solar radiation anchors (W/m^2).
    pub s_ra: [f64; 24],
    /// Hourly electric demand anchors (kW).
    pub p_d: [f64; 24],
    /// Hourly other-cooling-load anchors (kW).
    pub q_other: [f64; 24],
    /// Hourly building temperature set-point anchors (degC).
    pub t_br_sp: [f64; 24],
    /// Relative oscillation band of the realized curves.
    pub rho: f64,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Scenario presets. 1: normal day; 2: fluctuating weather with a wider
    /// oscillation band; 3: weak solar (300 W/m^2 peak).
    pub fn preset(id: u8, seed: u64) -> Result<Self, ModelError> {
        let hours: [f64; 24] = std::array::from_fn(|h| h as f64);
        let t_a_smooth = hours.map(|h| 28.5 - 4.5 * ((h - 14.0) * std::f64::consts::TAU / 24.0).cos());
        let bell = |peak: f64| {
            hours.map(|h| {
                let arg = (h - 13.0) * std::f64::consts::PI / 14.0;
                if (h - 13.0).abs() <= 7.0 {
                    peak * arg.cos().powi(2)
                } else {
                    0.0
                }
            })
        };
        // Double-hump demand within the supply capability.
        let p_d = hours.map(|h| {
            60.0 + 42.0 * (-((h - 10.5) / 2.5_f64).powi(2)).exp()
                + 50.0 * (-((h - 20.0) / 3.0_f64).powi(2)).exp()
        });
        let q_other = hours.map(|h| 12.0 + 16.0 * (-((h - 14.0) / 4.5_f64).powi(2)).exp());
        let t_br_sp = [24.0; 24];

        let spec = match id {
            1 => Self {
                id,
                t_a: t_a_smooth,
                s_ra: bell(1000.0),
                p_d,
                q_other,
                t_br_sp,
                rho: 0.05,
                seed,
            },
            2 => {
                // Seesawing temperature and cloud dips in the radiation.
                let t_a = hours.map(|h| {
                    28.5 - 4.5 * ((h - 14.0) * std::f64::consts::TAU / 24.0).cos()
                        + 1.5 * ((h * 2.1).sin())
                });
                let mut s_ra = bell(1000.0);
                for (h, v) in s_ra.iter_mut().enumerate() {
                    if h == 11 || h == 15 {
                        *v *= 0.45;
                    }
                }
                Self {
                    id,
                    t_a,
                    s_ra,
                    p_d,
                    q_other,
                    t_br_sp,
                    rho: 0.10,
                    seed,
                }
            }
            3 => Self {
                id,
                t_a: t_a_smooth,
                s_ra: bell(300.0),
                p_d,
                q_other,
                t_br_sp,
                rho: 0.05,
                seed,
            },
            other => {
                return Err(ModelError::Config(format!(
                    "unknown scenario id {other}; expected 1, 2 or 3"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=0.2).contains(&self.rho) {
            return Err(ModelError::Config(format!(
                "oscillation band rho = {} outside [0, 0.2]",
                self.rho
            )));
        }
        Ok(())
    }

    fn check_time(t: f64) -> Result<(), ModelError> {
        if !(0.0..DAY_S).contains(&t) {
            return Err(ModelError::Range {
                t,
                lo: 0.0,
                hi: DAY_S,
            });
        }
        Ok(())
    }

    fn interp(anchors: &[f64; 24], t: f64) -> f64 {
        let h = t / ANCHOR_SPACING_S;
        let i = h.floor() as usize;
        let frac = h - i as f64;
        let a = anchors[i % 24];
        let b = anchors[(i + 1) % 24];
        a + frac * (b - a)
    }

    /// Piecewise-linear forecast at `t` seconds into the day.
    pub fn forecast(&self, t: f64) -> Result<ForecastPoint, ModelError> {
        Self::check_time(t)?;
        Ok(ForecastPoint {
            disturbance: Disturbance {
                t_a: Self::interp(&self.t_a, t),
                s_ra: Self::interp(&self.s_ra, t),
                p_d: Self::interp(&self.p_d, t),
                q_other: Self::interp(&self.q_other, t),
            },
            t_br_sp: Self::interp(&self.t_br_sp, t),
        })
    }

    /// Realized disturbance at `t`: the forecast perturbed per 10-minute
    /// block. The temperature set-point never oscillates.
    pub fn realize(&self, t: f64) -> Result<Disturbance, ModelError> {
        let f = self.forecast(t)?;
        let block = (t / REALIZED_BLOCK_S).floor() as u64;
        let gain = |channel: u64| 1.0 + self.rho * signed_unit(self.seed, block, channel);
        Ok(Disturbance {
            t_a: f.disturbance.t_a * gain(0),
            s_ra: f.disturbance.s_ra * gain(1),
            p_d: f.disturbance.p_d * gain(2),
            q_other: f.disturbance.q_other * gain(3),
        })
    }

    /// Electric demand set-point at `t` (the realized demand curve).
    pub fn electric_setpoint(&self, t: f64) -> Result<f64, ModelError> {
        Ok(self.realize(t)?.p_d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let s: Self =
            serde_json::from_str(text).map_err(|e| ModelError::Config(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_are_exact_and_midpoints_interpolate() {
        let s = ScenarioSpec::preset(1, 7).unwrap();
        for h in 0..23 {
            let t = h as f64 * 3600.0;
            let f = s.forecast(t).unwrap();
            assert_eq!(f.disturbance.p_d, s.p_d[h]);
            let mid = s.forecast(t + 1800.0).unwrap();
            assert!(
                (mid.disturbance.p_d - 0.5 * (s.p_d[h] + s.p_d[h + 1])).abs() < 1e-12,
                "hour {h}"
            );
        }
    }

    #[test]
    fn scenario3_peak_radiation() {
        let s = ScenarioSpec::preset(3, 7).unwrap();
        let peak = (0..86400)
            .step_by(60)
            .map(|t| s.forecast(t as f64).unwrap().disturbance.s_ra)
            .fold(0.0, f64::max);
        assert!((peak - 300.0).abs() < 1e-9, "peak = {peak}");
    }

    #[test]
    fn zero_band_realizes_the_forecast() {
        let mut s = ScenarioSpec::preset(1, 7).unwrap();
        s.rho = 0.0;
        for t in [0.0, 1234.5, 43200.0, 86399.0] {
            assert_eq!(s.realize(t).unwrap().p_d, s.forecast(t).unwrap().disturbance.p_d);
        }
    }

    #[test]
    fn realized_curves_stay_in_band_all_day() {
        let s = ScenarioSpec::preset(2, 99).unwrap();
        for t in (0..86400).step_by(150) {
            let t = t as f64;
            let f = s.forecast(t).unwrap().disturbance;
            let r = s.realize(t).unwrap();
            for (fv, rv) in [
                (f.t_a, r.t_a),
                (f.s_ra, r.s_ra),
                (f.p_d, r.p_d),
                (f.q_other, r.q_other),
            ] {
                assert!(rv >= fv * (1.0 - s.rho) - 1e-12 && rv <= fv * (1.0 + s.rho) + 1e-12);
            }
        }
    }

    #[test]
    fn blocks_are_piecewise_constant_gains() {
        let s = ScenarioSpec::preset(1, 5).unwrap();
        // Flat segment of the set of anchors: same block, same gain.
        let g1 = s.realize(600.0).unwrap().p_d / s.forecast(600.0).unwrap().disturbance.p_d;
        let g2 = s.realize(1199.0).unwrap().p_d / s.forecast(1199.0).unwrap().disturbance.p_d;
        assert!((g1 - g2).abs() < 1e-12);
        let g3 = s.realize(1200.0).unwrap().p_d / s.forecast(1200.0).unwrap().disturbance.p_d;
        assert!((g1 - g3).abs() > 1e-6, "new block should redraw");
    }

    #[test]
    fn same_seed_replays_bitwise() {
        let a = ScenarioSpec::preset(2, 1234).unwrap();
        let b = ScenarioSpec::preset(2, 1234).unwrap();
        for t in (0..86400).step_by(61) {
            let t = t as f64;
            let ra = a.realize(t).unwrap();
            let rb = b.realize(t).unwrap();
            assert_eq!(ra.t_a.to_bits(), rb.t_a.to_bits());
            assert_eq!(ra.s_ra.to_bits(), rb.s_ra.to_bits());
            assert_eq!(ra.p_d.to_bits(), rb.p_d.to_bits());
            assert_eq!(ra.q_other.to_bits(), rb.q_other.to_bits());
        }
    }

    #[test]
    fn out_of_day_times_are_range_errors() {
        let s = ScenarioSpec::preset(1, 7).unwrap();
        assert!(s.forecast(-1.0).is_err());
        assert!(s.forecast(86400.0).is_err());
    }
}
