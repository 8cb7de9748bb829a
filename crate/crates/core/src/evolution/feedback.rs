use alloc::vec::Vec;

use super::control::{ControlPiece, ControlSignal};
use super::system::System;
use crate::banach::{duality_map, lp_norm};
use crate::gramian::{solve_resolvent_eq, GramianOperator, ResolventSolve};
use crate::math::{CompensatedSum, Real};
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// `ℓ = x_T − C_γ(T)ψ(0) − T_γ(T)η`.
pub fn steering_defect(sys: &System, target: &SpectralField) -> SpectralField {
    let free = sys.field(sys.free_state(sys.horizon()));
    target.band_limited().sub(&free)
}

/// The feedback piece for a resolvent solution on `[start, end]`:
/// `ζ = P𝒥[z]/λ`.
pub(crate) fn feedback_piece(sol: &ResolventSolve, start: f64, end: f64, sys: &System) -> ControlPiece {
    let j = duality_map(&sol.z, sys.space());
    ControlPiece { start, end, zeta: j.coeffs().iter().map(|c| c / sol.lambda).collect() }
}

/// The optimal control of the linear regulator problem,
/// `u(t) = B* S_γ(T−t)* 𝒥[R(λ, Φ_0^T) ℓ]`, together with the resolvent solve.
///
/// # Errors
///
/// [`Error::Validation`] if the system has impulses or the Gramian is not
/// `Φ_0^T`; propagated resolvent errors.
pub fn linear_feedback_control(
    sys: &System,
    target: &SpectralField,
    lambda: f64,
    gram: &GramianOperator,
) -> Result<(ControlSignal, ResolventSolve)> {
    if sys.schedule().count() != 0 {
        return Err(Error::invalid("schedule.breakpoints", "the linear regulator has no impulses"));
    }
    let (s, tau) = gram.interval();
    if s != 0.0 || (tau - sys.horizon()).abs() > 1e-12 * sys.horizon() {
        return Err(Error::invalid("gramian", "expected the Gramian on [0, T]"));
    }
    let ell = steering_defect(sys, target);
    let sol = solve_resolvent_eq(lambda, &ell, gram, sys.space())?;
    let piece = feedback_piece(&sol, 0.0, tau, sys);
    Ok((ControlSignal { lambda, pieces: alloc::vec![piece], perturbation: None }, sol))
}

/// Both sides of `x(T) − x_T = −λ R(λ, Φ_0^T) ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalIdentity {
    /// The simulated `x(T) − x_T`.
    pub lhs: SpectralField,
    /// `−z_λ(ℓ)`.
    pub rhs: SpectralField,
    /// `‖lhs − rhs‖_p`.
    pub gap: f64,
    /// `‖ℓ‖_p`.
    pub defect_norm: f64,
}

/// Simulates the feedback control and compares the terminal state with the
/// resolvent prediction.
///
/// # Errors
///
/// As [`linear_feedback_control`].
pub fn terminal_identity_check(
    sys: &System,
    target: &SpectralField,
    lambda: f64,
    gram: &GramianOperator,
) -> Result<TerminalIdentity> {
    let (u, sol) = linear_feedback_control(sys, target, lambda, gram)?;
    let x_t = sys.evaluate_terminal(&u, None, None)?;
    let lhs = x_t.sub(&target.band_limited());
    let rhs = sol.z.scale(-1.0);
    let gap = lp_norm(&lhs.sub(&rhs), sys.space());
    let defect_norm = lp_norm(&steering_defect(sys, target), sys.space());
    Ok(TerminalIdentity { lhs, rhs, gap, defect_norm })
}

/// `‖x(T) − x_T‖_p² + λ ∫_0^T (T−t)^{γ−1} ‖u(t)‖² dt`.
///
/// Controls live in the Hilbert space `L²(0, π)`, so the control energy uses
/// the Euclidean norm of the mode coefficients. The integral is taken in `σ = (T−t)^γ` with the system's time quadrature,
/// split at the control pieces' ends; for a single piece on `[0, T]` the nodes
/// are exactly those of `Φ_0^T`, so the discrete cost is minimized by the
/// discrete feedback law.
pub fn cost_functional(sys: &System, x_final: &SpectralField, u: &ControlSignal, target: &SpectralField) -> f64 {
    let sp = sys.space();
    let miss = lp_norm(&x_final.sub(&target.band_limited()), sp);
    if u.is_zero() {
        return miss * miss;
    }
    let gamma = sys.families().gamma();
    let horizon = sys.horizon();
    let inv = 1.0 / gamma;
    let mut cuts: Vec<f64> = alloc::vec![0.0, horizon.powf(gamma)];
    for p in &u.pieces {
        cuts.push((horizon - p.end).max(0.0).powf(gamma));
        cuts.push((horizon - p.start).max(0.0).powf(gamma));
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    let mut acc = CompensatedSum::new();
    for w in cuts.windows(2) {
        let (nodes, weights) = sys.quadrature().nodes(w[0], w[1]);
        for (&sg, &wt) in nodes.iter().zip(&weights) {
            let t = horizon - sg.powf(inv);
            let v = u.value(t, sys.families(), sys.control(), sys.modes());
            acc.add(wt * inv * v.iter().map(|c| c * c).sum::<f64>());
        }
    }
    miss * miss + u.lambda * acc.value()
}
