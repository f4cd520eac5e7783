//! Index sets of the slow / medium / fast split and projection helpers.

use crate::state::{ContinuousInput, PlantState, NU};

#[cfg(test)]
use crate::state::NX;

pub const N_SLOW: usize = 5;
pub const N_MEDIUM: usize = 9;
pub const N_FAST: usize = 9;

/// Zero-based state indices of the slow set:
/// `C_soc, C_sot, C_stc, C_sth, t_br`.
pub const SLOW_STATES: [usize; N_SLOW] = [16, 18, 19, 20, 22];

/// Zero-based state indices of the medium set:
/// `p_H2O, p_H2, P_mtf, t_abf, t_abw, t_abt, t_cwm, t_ewm, t_re`.
pub const MEDIUM_STATES: [usize; N_MEDIUM] = [3, 4, 5, 6, 7, 8, 11, 14, 21];

/// Zero-based state indices of the fast set:
/// `I_f, G_H2, p_O2, t_c, t_cs, t_e, t_es, v_cap, I_ba`.
pub const FAST_STATES: [usize; N_FAST] = [0, 1, 2, 9, 10, 12, 13, 15, 17];

/// Split of the continuous inputs by the dynamics they explicitly drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputPartition;

impl InputPartition {
    /// Slow inputs `G_ab, G_ec, G_stu` (positions in the input vector).
    pub const SLOW: [usize; 3] = [2, 4, 5];
    /// Medium input `G_fm`.
    pub const MEDIUM: [usize; 1] = [1];
    /// Fast inputs `G_ff, N_ec`.
    pub const FAST: [usize; 2] = [0, 3];

    /// Rebuilds a full input vector from the three sub-vectors.
    pub fn assemble(u_s: [f64; 3], u_m: [f64; 1], u_f: [f64; 2]) -> ContinuousInput {
        let mut u = [0.0; NU];
        for (k, &i) in Self::SLOW.iter().enumerate() {
            u[i] = u_s[k];
        }
        for (k, &i) in Self::MEDIUM.iter().enumerate() {
            u[i] = u_m[k];
        }
        for (k, &i) in Self::FAST.iter().enumerate() {
            u[i] = u_f[k];
        }
        ContinuousInput::from_array(u)
    }

    pub fn split(u: &ContinuousInput) -> ([f64; 3], [f64; 1], [f64; 2]) {
        let a = u.to_array();
        (
            Self::SLOW.map(|i| a[i]),
            Self::MEDIUM.map(|i| a[i]),
            Self::FAST.map(|i| a[i]),
        )
    }
}

pub fn project_slow(x: &PlantState) -> [f64; N_SLOW] {
    SLOW_STATES.map(|i| x[i])
}

pub fn project_medium(x: &PlantState) -> [f64; N_MEDIUM] {
    MEDIUM_STATES.map(|i| x[i])
}

pub fn project_fast(x: &PlantState) -> [f64; N_FAST] {
    FAST_STATES.map(|i| x[i])
}

/// Builds a full state from the three sub-vectors.
pub fn embed(x_s: &[f64; N_SLOW], x_m: &[f64; N_MEDIUM], x_f: &[f64; N_FAST]) -> PlantState {
    let mut x = PlantState::zeros();
    for (k, &i) in SLOW_STATES.iter().enumerate() {
        x[i] = x_s[k];
    }
    for (k, &i) in MEDIUM_STATES.iter().enumerate() {
        x[i] = x_m[k];
    }
    for (k, &i) in FAST_STATES.iter().enumerate() {
        x[i] = x_f[k];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_cover_all_indices_exactly_once() {
        let mut seen = [false; NX];
        for i in SLOW_STATES.iter().chain(&MEDIUM_STATES).chain(&FAST_STATES) {
            assert!(!seen[*i], "index {i} appears twice");
            seen[*i] = true;
        }
        assert!(seen.iter().all(|&s| s));

        let mut seen_u = [false; NU];
        for i in InputPartition::SLOW
            .iter()
            .chain(&InputPartition::MEDIUM)
            .chain(&InputPartition::FAST)
        {
            assert!(!seen_u[*i]);
            seen_u[*i] = true;
        }
        assert!(seen_u.iter().all(|&s| s));
    }

    #[test]
    fn project_embed_round_trip() {
        let mut x = PlantState::zeros();
        for i in 0..NX {
            x[i] = (i * i) as f64;
        }
        let y = embed(&project_slow(&x), &project_medium(&x), &project_fast(&x));
        assert_eq!(x, y);
    }

    #[test]
    fn input_split_round_trip() {
        let u = ContinuousInput::from_array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let (s, m, f) = InputPartition::split(&u);
        assert_eq!(s, [3.0, 5.0, 6.0]);
        assert_eq!(m, [2.0]);
        assert_eq!(f, [1.0, 4.0]);
        assert_eq!(InputPartition::assemble(s, m, f), u);
    }
}
