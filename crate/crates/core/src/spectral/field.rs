use alloc::sync::Arc;
use alloc::vec::Vec;

use super::SpatialGrid;
use crate::{Error, Result};

/// Tolerance on boundary samples accepted as Dirichlet data.
const DIRICHLET_TOL: f64 = 1e-9;

/// A state in `L^p(0, π)` held both as sine coefficients and as grid samples.
///
/// Fields built from coefficients are band-limited and their samples are the
/// synthesis of those coefficients. Fields built with
/// [`from_samples`](Self::from_samples) keep the samples verbatim (constants,
/// duality-map images and other data outside the span of the first `N`
/// modes) and carry their projection as coefficients. Linear combinations act
/// on both representations, so each stays consistent with its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Arc<SpatialGrid>,
    coeffs: Vec<f64>,
    values: Vec<f64>,
}

impl SpectralField {
    /// The zero field.
    pub fn zero(grid: &Arc<SpatialGrid>) -> Self {
        Self { grid: grid.clone(), coeffs: alloc::vec![0.0; grid.modes()], values: alloc::vec![0.0; grid.n_points()] }
    }

    /// The eigenfunction `w_n`, `1 ≤ n ≤ N`.
    ///
    /// # Panics
    ///
    /// If `n` is zero or exceeds the grid's mode count.
    pub fn mode(grid: &Arc<SpatialGrid>, n: usize) -> Self {
        assert!(n >= 1 && n <= grid.modes(), "mode {n} outside 1..={}", grid.modes());
        let mut coeffs = alloc::vec![0.0; grid.modes()];
        coeffs[n - 1] = 1.0;
        Self { grid: grid.clone(), coeffs, values: grid.basis(n).to_vec() }
    }

    /// Band-limited field `Σ c_n w_n`.
    ///
    /// # Errors
    ///
    /// [`Error::Validation`] when the length differs from the mode count.
    pub fn from_coeffs(grid: &Arc<SpatialGrid>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != grid.modes() {
            return Err(Error::invalid(
                "coeffs",
                alloc::format!("expected {} coefficients, got {}", grid.modes(), coeffs.len()),
            ));
        }
        let values = grid.synthesize(&coeffs);
        Ok(Self { grid: grid.clone(), coeffs, values })
    }

    /// Field whose samples are kept exactly as given.
    ///
    /// # Errors
    ///
    /// [`Error::Validation`] when the length differs from the node count.
    pub fn from_samples(grid: &Arc<SpatialGrid>, values: Vec<f64>) -> Result<Self> {
        check_len(grid, &values)?;
        let coeffs = grid.project(&values);
        Ok(Self { grid: grid.clone(), coeffs, values })
    }

    /// Constant function `c` (not Dirichlet; kept as samples).
    pub fn constant(grid: &Arc<SpatialGrid>, c: f64) -> Self {
        Self::from_samples(grid, alloc::vec![c; grid.n_points()]).expect("length matches by construction")
    }

    /// Samples `f` on the grid, keeping the samples verbatim.
    pub fn sample(grid: &Arc<SpatialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::from_samples(grid, values).expect("length matches by construction")
    }

    /// The grid this field lives on.
    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    /// Coefficients against `w_1..w_N`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Grid samples.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Band-limited field with coefficients `f(n, c_n)`; `n` counts from 1.
    pub fn map_modes(&self, mut f: impl FnMut(usize, f64) -> f64) -> Self {
        let coeffs: Vec<f64> = self.coeffs.iter().enumerate().map(|(i, &c)| f(i + 1, c)).collect();
        let values = self.grid.synthesize(&coeffs);
        Self { grid: self.grid.clone(), coeffs, values }
    }

    /// The band-limited part `Σ c_n w_n` of this field.
    pub fn band_limited(&self) -> Self {
        self.map_modes(|_, c| c)
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: f64, b: f64, other: &Self) -> Self {
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| a * x + b * y).collect(),
            values: self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect(),
        }
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Self {
        self.lincomb(1.0, 1.0, other)
    }

    /// `self − other`.
    pub fn sub(&self, other: &Self) -> Self {
        self.lincomb(1.0, -1.0, other)
    }

    /// `c·self`.
    pub fn scale(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|x| c * x).collect(),
            values: self.values.iter().map(|x| c * x).collect(),
        }
    }

    /// In-place `self += a·other`.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += a * y;
        }
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
    }

    /// `max_n |c_n|`.
    pub fn coeff_max(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `max_i |x(ξ_i)|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Euclidean norm of the coefficient vector (the `L²` norm of the
    /// band-limited part).
    pub fn coeff_norm(&self) -> f64 {
        libm::sqrt(self.coeffs.iter().map(|c| c * c).sum())
    }

    /// Grid pairing `∫ x y dξ` by the trapezoid rule.
    pub fn pairing(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).zip(self.grid.weights()).map(|((a, b), w)| a * b * w).sum()
    }
}

fn check_len(grid: &SpatialGrid, values: &[f64]) -> Result<()> {
    if values.len() != grid.n_points() {
        return Err(Error::invalid(
            "values",
            alloc::format!("expected {} grid samples, got {}", grid.n_points(), values.len()),
        ));
    }
    Ok(())
}

/// Sine transform of Dirichlet grid data: coefficients by trapezoid
/// quadrature, samples re-synthesized from them.
///
/// # Errors
///
/// [`Error::Validation`] for a length mismatch or boundary values farther
/// than `1e-9` from zero.
pub fn sine_transform(values: &[f64], grid: &Arc<SpatialGrid>) -> Result<SpectralField> {
    check_len(grid, values)?;
    let (first, last) = (values[0], values[values.len() - 1]);
    if first.abs() > DIRICHLET_TOL || last.abs() > DIRICHLET_TOL {
        return Err(Error::invalid(
            "values",
            alloc::format!("boundary samples {first:e}, {last:e} violate the Dirichlet condition"),
        ));
    }
    SpectralField::from_coeffs(grid, grid.project(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Real;
    use core::f64::consts::PI;

    fn grid() -> Arc<SpatialGrid> {
        Arc::new(SpatialGrid::with_modes(8).unwrap())
    }

    #[test]
    fn transform_of_a_mode_is_a_unit_vector() {
        let g = grid();
        let f = sine_transform(g.basis(1), &g).unwrap();
        assert!((f.coeffs()[0] - 1.0).abs() < 1e-14);
        assert!(f.coeffs()[1..].iter().all(|c| c.abs() < 1e-14));
    }

    #[test]
    fn transform_of_a_trig_combination() {
        let g = grid();
        let v: Vec<f64> = g.nodes().iter().map(|&x| (2.0 * x).sin() + 3.0 * (5.0 * x).sin()).collect();
        let f = sine_transform(&v, &g).unwrap();
        let r = (PI / 2.0).sqrt();
        let mut want = alloc::vec![0.0; 8];
        want[1] = r;
        want[4] = 3.0 * r;
        for (c, w) in f.coeffs().iter().zip(&want) {
            assert!((c - w).abs() < 1e-13);
        }
        for (a, b) in f.values().iter().zip(&v) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn non_dirichlet_data_is_rejected() {
        let g = grid();
        let v = alloc::vec![1.0; g.n_points()];
        assert!(matches!(sine_transform(&v, &g), Err(Error::Validation { .. })));
        assert!(sine_transform(&v[1..], &g).is_err());
    }

    #[test]
    fn linear_combinations_act_on_both_representations() {
        let g = grid();
        let a = SpectralField::mode(&g, 2);
        let b = SpectralField::constant(&g, 1.0);
        let c = a.lincomb(2.0, -1.0, &b);
        assert!((c.values()[3] - (2.0 * g.basis(2)[3] - 1.0)).abs() < 1e-15);
        assert!((c.coeffs()[1] - (2.0 - b.coeffs()[1])).abs() < 1e-15);
    }
}
