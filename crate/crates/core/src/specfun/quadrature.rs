use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::{CompensatedSum, Real};

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes nodes and weights by Newton iteration on `P_n`, started from
    /// Tricomi's asymptotic approximation of the roots.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Always false; a rule has at least one node.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes on `[-1, 1]`, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights matching [`GaussLegendre::nodes`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// `∫_a^b f`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (x, w) in self.mapped(a, b) {
            acc.add(w * f(x));
        }
        acc.value()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Globally adaptive bisection: a panel is accepted when the rule on the
/// panel and on its two halves agree to within the panel's share of the
/// tolerance. Returns the integral and the summed error estimate.
///
/// # Errors
///
/// [`Error::Accuracy`] if some panel was still unresolved at `max_depth`
/// and the summed error estimate exceeds `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive_integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rule: &GaussLegendre,
    abs_tol: f64,
    rel_tol: f64,
    max_depth: u32,
) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let width = b - a;
    let whole = rule.integrate(&mut f, a, b);
    let mut stack = alloc::vec![(a, b, whole, 0u32)];
    let mut total = CompensatedSum::new();
    let mut err_total = 0.0;
    let mut scale = whole.abs();
    let mut failed = false;
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(&mut f, lo, mid);
        let right = rule.integrate(&mut f, mid, hi);
        let refined = left + right;
        let err = (refined - est).abs();
        scale = scale.max(refined.abs());
        let allowed = (abs_tol.max(rel_tol * scale) * ((hi - lo) / width).max(1e-3)).max(f64::MIN_POSITIVE);
        if err <= allowed || depth >= max_depth {
            if err > allowed {
                failed = true;
            }
            total.add(refined);
            err_total += err;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    let total_value = total.value();
    if failed && err_total > abs_tol.max(rel_tol * total_value.abs()) {
        return Err(Error::Accuracy { estimate: err_total, context: "adaptive quadrature" });
    }
    Ok((total_value, err_total))
}

/// How integrals over `θ ∈ [0, ∞)` are discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureScheme {
    /// Composite Gauss–Legendre on unit panels over `[0, upper_cutoff]`.
    FixedGaussLegendre,
    /// Adaptive bisection started from unit panels.
    Adaptive,
}

/// Discretization of the truncated `θ`-integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Nodes per panel (≥ 8).
    pub node_count: usize,
    /// Truncation point of `[0, ∞)` (≥ 10).
    pub upper_cutoff: f64,
    /// Panel strategy.
    pub scheme: QuadratureScheme,
}

impl Default for QuadratureSpec {
    /// Adaptive, cutoff 40, 32-node panels. The Wright kernel decays
    /// super-exponentially, so a cutoff of 40 is very conservative.
    fn default() -> Self {
        Self { node_count: 32, upper_cutoff: 40.0, scheme: QuadratureScheme::Adaptive }
    }
}

impl QuadratureSpec {
    /// Checks `node_count ≥ 8` and `upper_cutoff ≥ 10`.
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(Error::invalid("quadrature.node_count", "must be at least 8"));
        }
        if !(self.upper_cutoff >= 10.0) || !self.upper_cutoff.is_finite() {
            return Err(Error::invalid("quadrature.upper_cutoff", "must be a finite value ≥ 10"));
        }
        Ok(())
    }

    /// `∫_0^{cutoff} f` according to the scheme.
    pub fn integrate_truncated<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<f64> {
        self.validate()?;
        let rule = GaussLegendre::new(self.node_count);
        let panels = self.upper_cutoff.ceil() as usize;
        let step = self.upper_cutoff / panels as f64;
        let mut acc = CompensatedSum::new();
        for k in 0..panels {
            let a = k as f64 * step;
            let b = if k + 1 == panels { self.upper_cutoff } else { a + step };
            let v = match self.scheme {
                QuadratureScheme::FixedGaussLegendre => rule.integrate(&mut f, a, b),
                QuadratureScheme::Adaptive => adaptive_integrate(&mut f, a, b, &rule, 1e-15, 1e-13, 30)?.0,
            };
            acc.add(v);
        }
        Ok(acc.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        for n in [1, 2, 5, 8, 32, 64] {
            let g = GaussLegendre::new(n);
            let s: f64 = g.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n}: {s}");
            for i in 0..n {
                assert!((g.nodes()[i] + g.nodes()[n - 1 - i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let g = GaussLegendre::new(6);
        for deg in 0..12 {
            let exact = (2.0f64.powi(deg + 1) - 0.0) / (deg as f64 + 1.0);
            let got = g.integrate(|x| x.powi(deg), 0.0, 2.0);
            assert!((got - exact).abs() < 1e-12 * exact.max(1.0), "deg {deg}");
        }
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let g = GaussLegendre::new(16);
        let (v, _) = adaptive_integrate(|x| (40.0 * x).cos(), 0.0, 3.0, &g, 1e-14, 1e-13, 30).unwrap();
        assert!((v - (120.0f64).sin() / 40.0).abs() < 1e-13);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::default().validate().is_ok());
        let bad = QuadratureSpec { node_count: 4, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = QuadratureSpec { upper_cutoff: 5.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn truncated_integral_of_decaying_exponential() {
        for scheme in [QuadratureScheme::Adaptive, QuadratureScheme::FixedGaussLegendre] {
            let q = QuadratureSpec { scheme, ..Default::default() };
            let v = q.integrate_truncated(|x| (-x).exp()).unwrap();
            assert!((v - (1.0 - (-40.0f64).exp())).abs() < 1e-13);
        }
    }
}
