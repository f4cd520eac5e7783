//! Performance indices computed from closed-loop logs.

use serde::{Deserialize, Serialize};

/// Fuel-equivalence factor of the storage credit.
pub const K_E1: f64 = 0.09807;
/// Battery capacity weight in the storage credit.
pub const K_E2: f64 = 561.6;
/// Tank capacity weight in the storage credit.
pub const K_E3: f64 = 106.1424;

/// One metric sample taken on the fast grid.
#[derive(Debug, Clone, Copy)]
pub struct MetricSample {
    /// Electric power supplied (kW).
    pub y1: f64,
    /// Electric demand set-point (kW).
    pub y_sp1: f64,
    /// Building temperature (degC).
    pub y2: f64,
    /// Zone lower bound (degC).
    pub y_l: f64,
    /// Zone upper bound (degC).
    pub y_h: f64,
    /// Fuel-cell gas flow (kg/s).
    pub u1: f64,
    /// Microturbine gas flow (kg/s).
    pub u2: f64,
}

/// Summed absolute electric tracking error.
pub fn compute_ee(samples: &[MetricSample]) -> f64 {
    samples.iter().map(|s| (s.y1 - s.y_sp1).abs()).sum()
}

/// Summed distance of the building temperature to its zone: zero inside,
/// linear outside.
pub fn compute_et(samples: &[MetricSample]) -> f64 {
    samples
        .iter()
        .map(|s| 0.5 * ((s.y2 - s.y_l).abs() + (s.y2 - s.y_h).abs() - (s.y_h - s.y_l).abs()))
        .sum()
}

/// Summed fuel use minus the storage surplus credit.
pub fn compute_ef(samples: &[MetricSample], delta_c_soc: f64, delta_c_sot: f64) -> f64 {
    let fuel: f64 = samples.iter().map(|s| s.u1 + s.u2).sum();
    fuel - K_E1 * (K_E2 * delta_c_soc + K_E3 * delta_c_sot)
}

/// Per-controller solve statistics.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SolveStats {
    pub controller: String,
    pub solves: usize,
    pub mean_solve_time_s: f64,
    pub total_time_per_hour_s: f64,
    pub fallbacks: usize,
}

/// The four indices plus solve-time statistics for one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerformanceReport {
    pub e_e: f64,
    pub e_t: f64,
    pub e_f: f64,
    pub e_oa: f64,
    /// Zone bounds used when accumulating `e_t` (constant-delta runs).
    pub zone_delta: f64,
    /// Metric sampling tick (s).
    pub metric_tick_s: f64,
    pub solve_stats: Vec<SolveStats>,
}

impl PerformanceReport {
    pub fn from_samples(
        samples: &[MetricSample],
        delta_c_soc: f64,
        delta_c_sot: f64,
        zone_delta: f64,
        metric_tick_s: f64,
    ) -> Self {
        let e_e = compute_ee(samples);
        let e_t = compute_et(samples);
        let e_f = compute_ef(samples, delta_c_soc, delta_c_sot);
        Self {
            e_e,
            e_t,
            e_f,
            e_oa: e_e + e_t + e_f,
            zone_delta,
            metric_tick_s,
            solve_stats: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// One CSV row of the deterministic indices (no timing fields).
    pub fn csv_row(&self) -> String {
        format!(
            "{:.6},{:.6},{:.6},{:.6},{},{}",
            self.e_e, self.e_t, self.e_f, self.e_oa, self.zone_delta, self.metric_tick_s
        )
    }

    pub const CSV_HEADER: &'static str = "E_e,E_t,E_f,E_oa,delta,metric_tick_s";
}
