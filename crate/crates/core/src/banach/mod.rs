//! `L^p` geometry on the grid and the weighted history phase space.

mod lebesgue;
mod phase;

pub use lebesgue::{dual_norm, duality_map, duality_map_inverse, lp_norm, pairing, LebesgueSpace};
pub(crate) use phase::exp_linear_weights;
pub use phase::{
    lemma21_check, lemma21_sides, phase_norm, segment_at, theta_min_for, HistorySegment, PhaseConstants,
    THETA_MIN_CEIL, THETA_MIN_FLOOR,
};
