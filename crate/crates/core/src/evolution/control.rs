use alloc::vec::Vec;

use crate::evolution::trajectory::interpolate_coeffs;
use crate::spectral::{ControlOperatorSpec, Families};

/// One feedback piece `u(t) = B* S_γ(end − t)* ζ` on `(start, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPiece {
    /// Left end `s_j` (excluded from the support).
    pub start: f64,
    /// Right end `τ_{j+1}`.
    pub end: f64,
    /// `ζ = P𝒥[z]/λ` in mode coordinates.
    pub zeta: Vec<f64>,
}

/// An additive piecewise-linear control `δu` on `[0, T]`, given by its
/// values (in `U`'s mode coordinates) at increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    /// Node times covering `[0, T]`.
    pub times: Vec<f64>,
    /// One coefficient vector per node.
    pub values: Vec<Vec<f64>>,
}

impl Perturbation {
    /// `δu(t)`, held constant outside the nodes.
    pub fn at(&self, t: f64) -> Vec<f64> {
        interpolate_coeffs(&self.times, &self.values, t)
    }
}

/// A control signal: feedback pieces supported on the controlled intervals,
/// optionally plus a perturbation, for a given `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSignal {
    /// The regularization parameter the control was built for.
    pub lambda: f64,
    /// Pieces in time order.
    pub pieces: Vec<ControlPiece>,
    /// Optional additive term.
    pub perturbation: Option<Perturbation>,
}

impl ControlSignal {
    /// `u ≡ 0`.
    pub fn zero(lambda: f64) -> Self {
        Self { lambda, pieces: Vec::new(), perturbation: None }
    }

    /// The same signal plus `δu`.
    pub fn with_perturbation(&self, p: Perturbation) -> Self {
        Self { perturbation: Some(p), ..self.clone() }
    }

    /// `u(t)` in mode coordinates (`modes` entries).
    pub fn value(&self, t: f64, families: &Families, b: &ControlOperatorSpec, modes: usize) -> Vec<f64> {
        let mut out = match &self.perturbation {
            Some(p) => p.at(t),
            None => alloc::vec![0.0; modes],
        };
        for piece in &self.pieces {
            if t > piece.start && t <= piece.end {
                let v: Vec<f64> = (0..modes).map(|n| families.s(n + 1, piece.end - t) * piece.zeta[n]).collect();
                for (o, w) in out.iter_mut().zip(b.apply_adjoint_coeffs(&v)) {
                    *o += w;
                }
            }
        }
        out
    }

    /// `true` if neither pieces nor a perturbation are present.
    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty() && self.perturbation.is_none()
    }
}
