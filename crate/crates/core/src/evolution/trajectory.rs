use alloc::vec::Vec;

use crate::banach::{lp_norm, LebesgueSpace};
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// Whether a piece follows the controlled dynamics or an impulse map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    /// `[0, τ₁]` or `(s_j, τ_{j+1}]`: the mild-solution formula.
    Active,
    /// `(τ_j, s_j]`: the state equals `h_j(t, x(τ_j⁻))`.
    Impulse,
}

/// Samples of the state on one interval of the schedule.
///
/// The first sample of every piece after the first sits on the left end of
/// its interval and holds the right limit there; the left limit is the last
/// sample of the previous piece.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPiece {
    /// Dynamics on this piece.
    pub kind: PieceKind,
    /// Interval index `j`.
    pub index: usize,
    /// Strictly increasing sample times.
    pub times: Vec<f64>,
    /// One state per time.
    pub states: Vec<SpectralField>,
}

/// A piecewise-continuous, left-continuous trajectory on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pieces: Vec<TrajectoryPiece>,
}

impl Trajectory {
    /// Assembles pieces, checking that they tile `[t₀, T]` in order.
    ///
    /// # Errors
    ///
    /// [`Error::Validation`] naming `trajectory` on empty pieces, length
    /// mismatches, non-increasing times or gaps between pieces.
    pub fn new(pieces: Vec<TrajectoryPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("trajectory", "no pieces"));
        }
        for (k, p) in pieces.iter().enumerate() {
            if p.times.is_empty() || p.times.len() != p.states.len() {
                return Err(Error::invalid("trajectory", alloc::format!("piece {k} has mismatched samples")));
            }
            if p.times.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::invalid("trajectory", alloc::format!("piece {k} times not increasing")));
            }
            if k > 0 {
                let prev = *pieces[k - 1].times.last().unwrap();
                if (p.times[0] - prev).abs() > 1e-12 * prev.abs().max(1.0) {
                    return Err(Error::invalid(
                        "trajectory",
                        alloc::format!("piece {k} starts at {} but the previous ends at {prev}", p.times[0]),
                    ));
                }
            }
        }
        Ok(Self { pieces })
    }

    /// The pieces in time order.
    pub fn pieces(&self) -> &[TrajectoryPiece] {
        &self.pieces
    }

    /// First sample time.
    pub fn start(&self) -> f64 {
        self.pieces[0].times[0]
    }

    /// Last sample time.
    pub fn horizon(&self) -> f64 {
        *self.pieces.last().unwrap().times.last().unwrap()
    }

    /// The state at the final time.
    pub fn terminal(&self) -> &SpectralField {
        self.pieces.last().unwrap().states.last().unwrap()
    }

    /// All `(t, x(t))` samples, pieces concatenated (jump times appear twice).
    pub fn samples(&self) -> impl Iterator<Item = (f64, &SpectralField)> {
        self.pieces.iter().flat_map(|p| p.times.iter().copied().zip(p.states.iter()))
    }

    /// Number of stored samples.
    pub fn sample_count(&self) -> usize {
        self.pieces.iter().map(|p| p.times.len()).sum()
    }

    /// `x(t)` by linear interpolation inside the piece that owns `t`; at a
    /// jump time the left limit is returned.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] for `t` outside `[start, horizon]`.
    pub fn state_at(&self, t: f64) -> Result<SpectralField> {
        let (lo, hi) = (self.start(), self.horizon());
        let slack = 1e-12 * hi.abs().max(1.0);
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(Error::domain(alloc::format!("time {t} outside [{lo}, {hi}]")));
        }
        let t = t.clamp(lo, hi);
        let piece = self.pieces.iter().find(|p| t <= *p.times.last().unwrap()).unwrap_or(self.pieces.last().unwrap());
        Ok(interpolate(&piece.times, &piece.states, t))
    }

    /// `sup_k ‖x(t_k) − y(t_k)‖_p` over matching samples.
    ///
    /// # Errors
    ///
    /// [`Error::Validation`] if the sample layouts differ.
    pub fn sup_distance(&self, other: &Self, sp: &LebesgueSpace) -> Result<f64> {
        if self.sample_count() != other.sample_count() {
            return Err(Error::invalid("trajectory", "sample layouts differ"));
        }
        Ok(self.samples().zip(other.samples()).map(|((_, a), (_, b))| lp_norm(&a.sub(b), sp)).fold(0.0, f64::max))
    }

    /// `sup ‖x(t)‖_p` over samples with `t ≤ until`.
    pub fn sup_norm_until(&self, until: f64, sp: &LebesgueSpace) -> f64 {
        self.samples().filter(|(t, _)| *t <= until).map(|(_, x)| lp_norm(x, sp)).fold(0.0, f64::max)
    }
}

/// Linear interpolation in a sampled piece; clamps to the end samples.
pub(crate) fn interpolate(times: &[f64], states: &[SpectralField], t: f64) -> SpectralField {
    if times.len() == 1 || t <= times[0] {
        return states[0].clone();
    }
    let k = times.partition_point(|&s| s < t);
    if k >= times.len() {
        return states[times.len() - 1].clone();
    }
    if times[k] == t {
        return states[k].clone();
    }
    let (t0, t1) = (times[k - 1], times[k]);
    let w = (t - t0) / (t1 - t0);
    states[k - 1].lincomb(1.0 - w, w, &states[k])
}

/// [`interpolate`] for raw coefficient vectors.
pub(crate) fn interpolate_coeffs(times: &[f64], values: &[Vec<f64>], t: f64) -> Vec<f64> {
    if times.len() == 1 || t <= times[0] {
        return values[0].clone();
    }
    let k = times.partition_point(|&s| s < t);
    if k >= times.len() {
        return values[times.len() - 1].clone();
    }
    let (t0, t1) = (times[k - 1], times[k]);
    let w = (t - t0) / (t1 - t0);
    values[k - 1].iter().zip(&values[k]).map(|(a, b)| (1.0 - w) * a + w * b).collect()
}
