use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::Real;
use crate::{Error, Result};

/// Uniform grid on `[0, π]`, endpoints included, with trapezoid weights and
/// the sampled eigenfunctions `w_n(ξ) = √(2/π) sin(nξ)`, `n = 1..=N`.
///
/// With `n_points − 1 ≥ 2N` intervals the trapezoid rule integrates every
/// product `w_n w_m` exactly, so projecting a band-limited field and
/// evaluating it again is the identity up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    modes: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    // row-major: basis[(n-1) * n_points + i] = w_n(ξ_i)
    basis: Vec<f64>,
}

impl SpatialGrid {
    /// Builds the grid for `modes` eigenfunctions on `n_points` nodes.
    ///
    /// # Errors
    ///
    /// [`Error::Validation`] if `modes == 0` or `n_points < 2·modes + 1`.
    pub fn new(modes: usize, n_points: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::invalid("grid.modes", "need at least one mode"));
        }
        if n_points < 2 * modes + 1 {
            return Err(Error::invalid(
                "grid.points",
                alloc::format!("{n_points} points cannot resolve {modes} modes (need ≥ {})", 2 * modes + 1),
            ));
        }
        let h = PI / (n_points - 1) as f64;
        let nodes: Vec<f64> = (0..n_points).map(|i| if i + 1 == n_points { PI } else { i as f64 * h }).collect();
        let mut weights = alloc::vec![h; n_points];
        weights[0] = 0.5 * h;
        weights[n_points - 1] = 0.5 * h;
        let norm = (2.0 / PI).sqrt();
        let mut basis = Vec::with_capacity(modes * n_points);
        for n in 1..=modes {
            // exact zeros at the walls keep Dirichlet data clean
            basis.extend(nodes.iter().enumerate().map(|(i, &x)| {
                if i == 0 || i + 1 == n_points {
                    0.0
                } else {
                    norm * (n as f64 * x).sin()
                }
            }));
        }
        Ok(Self { modes, nodes, weights, basis })
    }

    /// The grid used when only a mode count is given: `4N + 1` points.
    pub fn with_modes(modes: usize) -> Result<Self> {
        Self::new(modes, 4 * modes + 1)
    }

    /// Number of eigenfunctions `N`.
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Number of grid nodes.
    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }

    /// Node positions, `0 = ξ_0 < … < ξ_last = π`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `w_n` sampled on the grid, `n` counted from 1.
    pub fn basis(&self, n: usize) -> &[f64] {
        let m = self.n_points();
        &self.basis[(n - 1) * m..n * m]
    }

    /// Trapezoid quadrature of grid samples over `[0, π]`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Coefficients `⟨v, w_n⟩` by trapezoid quadrature.
    pub fn project(&self, values: &[f64]) -> Vec<f64> {
        (1..=self.modes)
            .map(|n| self.basis(n).iter().zip(values).zip(&self.weights).map(|((b, v), w)| b * v * w).sum())
            .collect()
    }

    /// Grid values of `Σ c_n w_n`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.n_points()];
        for (n, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.basis(n + 1)) {
                *o += c * b;
            }
        }
        out
    }
}
