use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::math::Real;
use crate::spectral::{SpatialGrid, SpectralField};
use crate::{Error, Result};

/// `L^p(0, π)` for `p ≥ 2`, discretized by the grid's trapezoid rule.
///
/// Every identity of the duality map (`⟨x, 𝒥x⟩ = ‖x‖²`,
/// `‖𝒥x‖_q = ‖x‖_p`) holds exactly for the discrete norms and pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct LebesgueSpace {
    p: f64,
    grid: Arc<SpatialGrid>,
}

impl LebesgueSpace {
    /// # Errors
    ///
    /// [`Error::Validation`] naming `space.p` unless `2 ≤ p < ∞`.
    pub fn new(p: f64, grid: Arc<SpatialGrid>) -> Result<Self> {
        if !(p >= 2.0) || !p.is_finite() {
            return Err(Error::invalid("space.p", alloc::format!("{p} outside [2, ∞)")));
        }
        Ok(Self { p, grid })
    }

    /// The exponent.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// The conjugate exponent `p/(p−1)`.
    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `true` when `p = 2` and `𝒥` is the identity.
    pub fn is_hilbert(&self) -> bool {
        self.p == 2.0
    }

    /// The spatial grid.
    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }
}

fn grid_norm(values: &[f64], weights: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        return values.iter().zip(weights).map(|(v, w)| w * v * v).sum::<f64>().sqrt();
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    // scaled to keep |v|^p representable for large p
    let s: f64 = values.iter().zip(weights).map(|(v, w)| w * (v.abs() / scale).powf(p)).sum();
    scale * s.powf(1.0 / p)
}

/// `‖x‖_p` by trapezoid quadrature of the grid samples.
pub fn lp_norm(x: &SpectralField, sp: &LebesgueSpace) -> f64 {
    grid_norm(x.values(), sp.grid.weights(), sp.p)
}

/// `‖x*‖_q`, the norm of a dual element.
pub fn dual_norm(xstar: &SpectralField, sp: &LebesgueSpace) -> f64 {
    grid_norm(xstar.values(), sp.grid.weights(), sp.q())
}

/// The dual pairing `⟨x, x*⟩ = ∫ x x* dξ`.
pub fn pairing(x: &SpectralField, xstar: &SpectralField) -> f64 {
    x.pairing(xstar)
}

/// The duality mapping `𝒥[x] = ‖x‖_p^{2−p} |x|^{p−2} x`, kept as samples.
///
/// For `p = 2` this is the identity (the field is returned unchanged).
pub fn duality_map(x: &SpectralField, sp: &LebesgueSpace) -> SpectralField {
    if sp.is_hilbert() {
        return x.clone();
    }
    let norm = lp_norm(x, sp);
    if norm == 0.0 {
        return SpectralField::zero(x.grid());
    }
    let p = sp.p;
    let values: Vec<f64> = x.values().iter().map(|&v| (v.abs() / norm).powf(p - 2.0) * v).collect();
    SpectralField::from_samples(x.grid(), values).expect("same grid")
}

/// Inverse duality map `X* → X`: `𝒥⁻¹[y] = ‖y‖_q^{2−q} |y|^{q−2} y`.
pub fn duality_map_inverse(y: &SpectralField, sp: &LebesgueSpace) -> SpectralField {
    if sp.is_hilbert() {
        return y.clone();
    }
    let norm = dual_norm(y, sp);
    if norm == 0.0 {
        return SpectralField::zero(y.grid());
    }
    let q = sp.q();
    let values: Vec<f64> =
        y.values().iter().map(|&v| if v == 0.0 { 0.0 } else { (v.abs() / norm).powf(q - 2.0) * v }).collect();
    SpectralField::from_samples(y.grid(), values).expect("same grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn space(p: f64) -> LebesgueSpace {
        LebesgueSpace::new(p, Arc::new(SpatialGrid::with_modes(8).unwrap())).unwrap()
    }

    #[test]
    fn exponent_validation() {
        let g = Arc::new(SpatialGrid::with_modes(2).unwrap());
        assert!(LebesgueSpace::new(1.5, g.clone()).is_err());
        assert!(LebesgueSpace::new(f64::INFINITY, g).is_err());
    }

    #[test]
    fn norms_of_simple_fields() {
        let sp = space(2.0);
        let g = sp.grid().clone();
        assert_eq!(lp_norm(&SpectralField::zero(&g), &sp), 0.0);
        assert!((lp_norm(&SpectralField::mode(&g, 1), &sp) - 1.0).abs() < 1e-14);
        for p in [2.0, 3.0, 4.5] {
            let sp = space(p);
            let c = SpectralField::constant(&g, 2.0);
            assert!((lp_norm(&c, &sp) - 2.0 * PI.powf(1.0 / p)).abs() < 1e-13);
        }
    }

    #[test]
    fn duality_of_a_constant() {
        let sp = space(4.0);
        let g = sp.grid().clone();
        let j = duality_map(&SpectralField::constant(&g, 3.0), &sp);
        for v in j.values() {
            assert!((v - 3.0 / PI.sqrt()).abs() < 1e-13);
        }
    }

    #[test]
    fn inverse_undoes_the_map() {
        let sp = space(3.0);
        let g = sp.grid().clone();
        let x = SpectralField::from_coeffs(&g, alloc::vec![1.0, -0.5, 0.0, 0.2, 0.0, 0.0, 0.1, 0.0]).unwrap();
        let back = duality_map_inverse(&duality_map(&x, &sp), &sp);
        for (a, b) in back.values().iter().zip(x.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
