//! The weighted history space `PC_g` with `g(θ) = e^{aθ}`, `a < 0`, and the
//! norm `‖φ‖_B = ∫_{−∞}^0 ‖φ(θ)‖_p / g(θ) dθ`.
//!
//! Histories are stored on a truncated window `[θ_min, 0]` and extended to
//! the left by their first value; the norm integrates the piecewise-linear
//! interpolant of the node norms against `e^{−aθ}` exactly and adds the
//! (closed-form) contribution of the constant extension.

use alloc::vec::Vec;

use super::{lp_norm, LebesgueSpace};
use crate::evolution::{interpolate, Trajectory};
use crate::math::{linspace, Real};
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// Most negative window start accepted by [`theta_min_for`].
pub const THETA_MIN_FLOOR: f64 = -50.0;
/// Shortest window used by [`theta_min_for`].
pub const THETA_MIN_CEIL: f64 = -1.0;

/// `∫_{t0}^{t1} e^{κθ} ℓ_i(θ) dθ` for the two linear hat functions on
/// `[t0, t1]`, returned as `(weight of the left value, weight of the right)`.
pub(crate) fn exp_linear_weights(kappa: f64, t0: f64, t1: f64) -> (f64, f64) {
    let h = t1 - t0;
    if h <= 0.0 {
        return (0.0, 0.0);
    }
    let z = kappa * h;
    // E1 = ∫₀¹ e^{zs} ds, E2 = ∫₀¹ s e^{zs} ds
    let (e1, e2) = if z.abs() < 0.5 {
        let (mut e1, mut e2, mut term) = (0.0, 0.0, 1.0);
        for k in 0..20 {
            // term = z^k / k!
            e1 += term / (k + 1) as f64;
            e2 += term / (k + 2) as f64;
            term *= z / (k + 1) as f64;
        }
        (e1, e2)
    } else {
        let ez = z.exp();
        ((ez - 1.0) / z, (ez * (z - 1.0) + 1.0) / (z * z))
    };
    let base = h * (kappa * t0).exp();
    (base * (e1 - e2), base * e2)
}

/// A history `θ ↦ φ(θ)` sampled on `θ_min = θ_0 ≤ … ≤ θ_K = 0`.
///
/// A repeated node encodes a jump: the first copy holds the left limit and
/// point evaluation is left-continuous.
#[derive(Debug, Clone, PartialEq)]
pub struct HistorySegment {
    theta: Vec<f64>,
    values: Vec<SpectralField>,
    weight_rate: f64,
    tail_tol: f64,
}

impl HistorySegment {
    /// # Errors
    ///
    /// [`Error::Validation`] for empty or mismatched samples, decreasing
    /// nodes, a last node other than `0`, `a ≥ 0` or `tail_tol ≤ 0`.
    pub fn new(theta: Vec<f64>, values: Vec<SpectralField>, weight_rate: f64, tail_tol: f64) -> Result<Self> {
        if theta.is_empty() || theta.len() != values.len() {
            return Err(Error::invalid("history", "node and value counts differ"));
        }
        if theta.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("history", "nodes must be non-decreasing"));
        }
        if *theta.last().unwrap() != 0.0 {
            return Err(Error::invalid("history", "last node must be θ = 0"));
        }
        if !(weight_rate < 0.0) {
            return Err(Error::invalid("delay.a", alloc::format!("weight rate {weight_rate} must be < 0")));
        }
        if !(tail_tol > 0.0) {
            return Err(Error::invalid("delay.tail_tol", "must be > 0"));
        }
        Ok(Self { theta, values, weight_rate, tail_tol })
    }

    /// Samples `f` at `nodes` equispaced points of `[θ_min, 0]`.
    ///
    /// # Errors
    ///
    /// As [`new`](Self::new); also `θ_min ≥ 0` or fewer than two nodes.
    pub fn from_fn(
        theta_min: f64,
        nodes: usize,
        weight_rate: f64,
        tail_tol: f64,
        f: impl Fn(f64) -> SpectralField,
    ) -> Result<Self> {
        if !(theta_min < 0.0) || nodes < 2 {
            return Err(Error::invalid("history", "need θ_min < 0 and at least two nodes"));
        }
        let mut theta = linspace(theta_min, 0.0, nodes);
        *theta.last_mut().unwrap() = 0.0;
        let values = theta.iter().map(|&t| f(t)).collect();
        Self::new(theta, values, weight_rate, tail_tol)
    }

    /// The constant history `φ ≡ value`.
    pub fn constant(value: SpectralField, theta_min: f64, weight_rate: f64, tail_tol: f64) -> Result<Self> {
        Self::from_fn(theta_min, 2, weight_rate, tail_tol, |_| value.clone())
    }

    /// Nodes.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Values at the nodes.
    pub fn values(&self) -> &[SpectralField] {
        &self.values
    }

    /// Left end of the stored window.
    pub fn theta_min(&self) -> f64 {
        self.theta[0]
    }

    /// The weight rate `a`.
    pub fn weight_rate(&self) -> f64 {
        self.weight_rate
    }

    /// Truncation tolerance the window was sized for.
    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// `φ(0)`.
    pub fn at_zero(&self) -> &SpectralField {
        self.values.last().unwrap()
    }

    /// `φ(θ)`: linear between nodes, constant left of `θ_min`, left-continuous
    /// at jumps.
    pub fn value_at(&self, theta: f64) -> SpectralField {
        if theta <= self.theta[0] {
            return self.values[0].clone();
        }
        let k = self.theta.partition_point(|&s| s < theta);
        if k >= self.theta.len() {
            return self.at_zero().clone();
        }
        if self.theta[k] == theta {
            return self.values[k].clone();
        }
        interpolate(&self.theta[k - 1..=k], &self.values[k - 1..=k], theta)
    }

    /// `ψ_t(θ) = ψ(t + θ)` for `t ≤ 0`, on the same nodes.
    pub fn shifted(&self, t: f64) -> Self {
        let values = self.theta.iter().map(|&th| self.value_at(t + th)).collect();
        Self { theta: self.theta.clone(), values, weight_rate: self.weight_rate, tail_tol: self.tail_tol }
    }

    /// `sup_θ ‖φ(θ)‖_p` over the nodes.
    pub fn sup_norm(&self, sp: &LebesgueSpace) -> f64 {
        self.values.iter().map(|v| lp_norm(v, sp)).fold(0.0, f64::max)
    }
}

/// Window start `ln(tail_tol·|a| / max‖ψ‖)/|a|`, clamped to `[−50, −1]`, so
/// that the mass of `‖ψ‖/g` left of it is at most `tail_tol`.
pub fn theta_min_for(weight_rate: f64, tail_tol: f64, max_norm: f64) -> f64 {
    let k = weight_rate.abs();
    if max_norm <= 0.0 || k == 0.0 {
        return THETA_MIN_CEIL;
    }
    ((tail_tol * k / max_norm).ln() / k).clamp(THETA_MIN_FLOOR, THETA_MIN_CEIL)
}

/// `‖φ‖_B`: exact integral of the interpolated node norms against
/// `e^{−aθ}` plus `‖φ(θ_min)‖ e^{|a|θ_min}/|a|` for the constant extension.
pub fn phase_norm(seg: &HistorySegment, sp: &LebesgueSpace) -> f64 {
    let kappa = -seg.weight_rate;
    let norms: Vec<f64> = seg.values.iter().map(|v| lp_norm(v, sp)).collect();
    let mut total = norms[0] * (kappa * seg.theta[0]).exp() / kappa;
    for k in 1..seg.theta.len() {
        let (w0, w1) = exp_linear_weights(kappa, seg.theta[k - 1], seg.theta[k]);
        total += w0 * norms[k - 1] + w1 * norms[k];
    }
    total
}

/// The segment `x_t(θ) = x(t + θ)` on the history's window, splicing the
/// initial history (for `t + θ < 0`) with the trajectory samples. Jump times
/// appear as repeated nodes so interpolation never crosses an impulse.
///
/// # Errors
///
/// [`Error::Domain`] for `t` outside `[0, T]`.
pub fn segment_at(traj: &Trajectory, hist: &HistorySegment, t: f64) -> Result<HistorySegment> {
    let horizon = traj.horizon();
    if !(t >= 0.0 && t <= horizon * (1.0 + 1e-12)) {
        return Err(Error::domain(alloc::format!("segment time {t} outside [0, {horizon}]")));
    }
    if t == 0.0 {
        return Ok(hist.clone());
    }
    let theta_min = hist.theta_min();
    let mut theta = Vec::new();
    let mut values = Vec::new();
    if -t > theta_min {
        theta.push(theta_min);
        values.push(hist.value_at(theta_min + t));
        for (th, v) in hist.theta.iter().zip(&hist.values) {
            let s = th - t;
            if s > theta_min && *th < 0.0 {
                theta.push(s);
                values.push(v.clone());
            }
        }
    } else {
        theta.push(theta_min);
        values.push(traj.state_at(t + theta_min)?);
    }
    for (tk, x) in traj.samples() {
        let s = tk - t;
        if s > theta_min && s < 0.0 {
            theta.push(s);
            values.push(x.clone());
        }
    }
    theta.push(0.0);
    values.push(traj.state_at(t)?);
    HistorySegment::new(theta, values, hist.weight_rate, hist.tail_tol)
}

/// The constants of the phase-space estimate
/// `‖x_s‖_B ≤ K₁‖ψ‖_B + K₂ sup_{0≤θ≤s} ‖x(θ)‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConstants {
    /// `sup Θ^ψ + sup 𝒬`.
    pub k1: f64,
    /// `sup 𝒫 = T`.
    pub k2: f64,
    /// `sup_{t∈J} 𝒫(t)` with `𝒫(t) = t`.
    pub p_sup: f64,
    /// `sup_{t∈J} 𝒬(t)` with `𝒬(t) = e^{at}`.
    pub q_sup: f64,
}

impl PhaseConstants {
    /// Evaluates the constants for the horizon `T`, measuring `Θ^ψ` as the
    /// largest ratio `‖ψ_t‖_B/‖ψ‖_B` over `samples` shifts `t ∈ [θ_min, 0]`.
    pub fn compute(hist: &HistorySegment, sp: &LebesgueSpace, horizon: f64, samples: usize) -> Self {
        let base = phase_norm(hist, sp);
        let theta_sup = if base == 0.0 {
            0.0
        } else {
            linspace(hist.theta_min(), 0.0, samples.max(2))
                .into_iter()
                .map(|t| phase_norm(&hist.shifted(t), sp) / base)
                .fold(0.0, f64::max)
        };
        let q_sup = 1.0;
        Self { k1: theta_sup + q_sup, k2: horizon, p_sup: horizon, q_sup }
    }
}

/// Both sides of the phase-space estimate at time `s ∈ [θ_min, T]`.
///
/// # Errors
///
/// [`Error::Domain`] for `s` outside the admissible range.
pub fn lemma21_sides(
    traj: &Trajectory,
    hist: &HistorySegment,
    s: f64,
    consts: &PhaseConstants,
    sp: &LebesgueSpace,
) -> Result<(f64, f64)> {
    if s < hist.theta_min() {
        return Err(Error::domain(alloc::format!("s = {s} precedes the history window")));
    }
    let (seg, sup) = if s < 0.0 {
        (hist.shifted(s), 0.0)
    } else {
        let seg = segment_at(traj, hist, s)?;
        let sup = traj.sup_norm_until(s, sp).max(lp_norm(&traj.state_at(s)?, sp));
        (seg, sup)
    };
    Ok((phase_norm(&seg, sp), consts.k1 * phase_norm(hist, sp) + consts.k2 * sup))
}

/// Whether `‖x_s‖_B ≤ K₁‖ψ‖_B + K₂ sup ‖x‖` holds up to `1e-8`.
///
/// # Errors
///
/// As [`lemma21_sides`].
pub fn lemma21_check(
    traj: &Trajectory,
    hist: &HistorySegment,
    s: f64,
    consts: &PhaseConstants,
    sp: &LebesgueSpace,
) -> Result<bool> {
    let (lhs, rhs) = lemma21_sides(traj, hist, s, consts, sp)?;
    Ok(lhs <= rhs * (1.0 + 1e-8) + 1e-8)
}
