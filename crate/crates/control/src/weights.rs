//! Controller tuning: zone specification and weighting parameters.

use serde::{Deserialize, Serialize};

/// Target band for the building temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneSpec {
    /// Zone center set-point (degC).
    pub center: f64,
    /// Relaxation around the center (degC); zero collapses the zone to
    /// set-point tracking.
    pub delta: f64,
}

impl ZoneSpec {
    pub fn new(center: f64, delta: f64) -> Self {
        assert!(delta >= 0.0, "relaxation must be nonnegative");
        Self { center, delta }
    }

    pub fn lower(&self) -> f64 {
        self.center - self.delta
    }

    pub fn upper(&self) -> f64 {
        self.center + self.delta
    }

    /// Distance to the zone: zero inside, linear outside.
    pub fn distance(&self, y: f64) -> f64 {
        (self.lower() - y).max(0.0) + (y - self.upper()).max(0.0)
    }
}

/// Weighting parameters of every controller layer. Residuals are
/// normalized before weighting: manipulated-variable and state terms by
/// their bound ranges; output tracking and slack terms stay in natural
/// units so the energy-balance slack acts as a near-hard constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerWeights {
    /// Hourly layer: fuel weight.
    pub alpha_l: f64,
    /// Hourly layer: slack weights (electric balance, zone low, zone high).
    pub r_l: [f64; 3],
    /// Slow layer: electric tracking, zone tracking, fuel, battery
    /// reference, tank reference.
    pub alpha_s: [f64; 5],
    /// Medium layer: electric tracking, fuel.
    pub alpha_m: [f64; 2],
    /// Medium layer consistency: medium states, medium inputs, fast states,
    /// fast inputs.
    pub r_m: [f64; 4],
    /// Fast layer: electric tracking, fuel.
    pub alpha_f: [f64; 2],
    /// Fast layer consistency: fast states, fast inputs.
    pub r_f: [f64; 2],
    /// Steady-state optimization layer of the baseline.
    pub alpha_r: [f64; 5],
    /// Baseline tracking layer: state and input weights.
    pub r_t1: f64,
    pub r_t2: f64,
}

impl Default for ControllerWeights {
    fn default() -> Self {
        Self {
            alpha_l: 1.0,
            r_l: [1.0, 1.0, 1.0],
            alpha_s: [5.0, 5.0, 5.0, 8.0, 8.0],
            alpha_m: [8.0, 1.0],
            r_m: [8.0, 8.0, 8.0, 8.0],
            alpha_f: [8.0, 1.0],
            r_f: [8.0, 8.0],
            alpha_r: [5.0, 5.0, 5.0, 8.0, 8.0],
            r_t1: 8.0,
            r_t2: 8.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zone_distance_is_zero_inside() {
        let z = ZoneSpec::new(24.0, 0.5);
        assert_eq!(z.lower(), 23.5);
        assert_eq!(z.upper(), 24.5);
        assert_eq!(z.distance(24.3), 0.0);
        assert!((z.distance(25.0) - 0.5).abs() < 1e-12);
        assert!((z.distance(23.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_delta_collapses_to_setpoint() {
        let z = ZoneSpec::new(24.0, 0.0);
        assert_eq!(z.lower(), z.upper());
        assert!((z.distance(24.7) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn defaults_round_trip_through_json() {
        let w = ControllerWeights::default();
        let text = serde_json::to_string(&w).unwrap();
        let w2: ControllerWeights = serde_json::from_str(&text).unwrap();
        assert_eq!(w, w2);
        assert_eq!(w.alpha_s, [5.0, 5.0, 5.0, 8.0, 8.0]);
        assert_eq!(w.alpha_m, [8.0, 1.0]);
        assert_eq!(w.alpha_f, [8.0, 1.0]);
    }
}
