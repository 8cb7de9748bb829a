use alloc::vec::Vec;

use crate::math::Real;
use crate::specfun::GaussLegendre;
use crate::{Error, Result};

/// Composite Gauss–Legendre rule in the variable `σ = (τ − t)^γ`.
///
/// Panels are graded quadratically towards the left end (`σ = 0`, i.e.
/// `t = τ`), where the substitution `t = τ − σ^{1/γ}` concentrates the
/// curvature of anything composed with it.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeQuadrature {
    panels_per_unit: f64,
    rule: GaussLegendre,
}

impl Default for TimeQuadrature {
    /// 64 panels per unit σ-length, 8 points per panel.
    fn default() -> Self {
        Self::new(64.0, 8).expect("valid defaults")
    }
}

impl TimeQuadrature {
    /// # Errors
    ///
    /// [`Error::Validation`] unless `panels_per_unit > 0` and `order ≥ 2`.
    pub fn new(panels_per_unit: f64, order: usize) -> Result<Self> {
        if !(panels_per_unit > 0.0) || !panels_per_unit.is_finite() {
            return Err(Error::invalid("quadrature.panels_per_unit", "must be positive"));
        }
        if order < 2 {
            return Err(Error::invalid("quadrature.order", "must be at least 2"));
        }
        Ok(Self { panels_per_unit, rule: GaussLegendre::new(order) })
    }

    /// Panels per unit length.
    pub fn panels_per_unit(&self) -> f64 {
        self.panels_per_unit
    }

    /// Points per panel.
    pub fn order(&self) -> usize {
        self.rule.len()
    }

    /// The same rule with twice as many panels.
    pub fn refined(&self) -> Self {
        Self { panels_per_unit: 2.0 * self.panels_per_unit, rule: self.rule.clone() }
    }

    /// Panel count used on an interval of length `len`.
    pub fn panel_count(&self, len: f64) -> usize {
        ((len * self.panels_per_unit).ceil() as usize).max(1)
    }

    /// Nodes and weights on `[lo, hi]`, graded towards `lo`.
    pub fn nodes(&self, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        let mut x = Vec::new();
        let mut w = Vec::new();
        if !(hi > lo) {
            return (x, w);
        }
        let m = self.panel_count(hi - lo);
        let edge = |k: usize| {
            let r = k as f64 / m as f64;
            lo + (hi - lo) * r * r
        };
        for k in 0..m {
            for (xi, wi) in self.rule.mapped(edge(k), edge(k + 1)) {
                x.push(xi);
                w.push(wi);
            }
        }
        (x, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_a_smooth_function() {
        let q = TimeQuadrature::default();
        let (x, w) = q.nodes(0.0, 2.5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * (3.0 * x).sin() * x.sqrt()).sum();
        // ∫₀^{2.5} √x sin 3x dx
        assert!((s + 0.030_291_524_476_355_498).abs() < 1e-10, "{s}");
        assert!(q.nodes(1.0, 1.0).0.is_empty());
    }

    #[test]
    fn validation() {
        assert!(TimeQuadrature::new(0.0, 8).is_err());
        assert!(TimeQuadrature::new(8.0, 1).is_err());
        assert_eq!(TimeQuadrature::default().refined().panels_per_unit(), 128.0);
    }
}
