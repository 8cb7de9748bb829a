use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::GramianOperator;
use crate::banach::{duality_map, lp_norm, LebesgueSpace};
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// Solution of `λz + Φ𝒥[z] = λh`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventSolve {
    /// `z_λ(h)`.
    pub z: SpectralField,
    /// `‖λz + Φ𝒥[z] − λh‖_p`.
    pub residual: f64,
    /// Iterations used (`1` for the direct `p = 2` solve).
    pub iterations: usize,
    /// `λ`.
    pub lambda: f64,
}

/// Stopping rules for the nonlinear (`p ≠ 2`) solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventOptions {
    /// Required residual relative to `λ‖h‖`.
    pub rel_tol: f64,
    /// Damped fixed-point sweeps before switching to Newton.
    pub fixed_point_iters: usize,
    /// Newton steps.
    pub newton_iters: usize,
}

impl Default for ResolventOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, fixed_point_iters: 50, newton_iters: 60 }
    }
}

/// `z_λ = λ(λI + Φ𝒥)⁻¹h` with default options.
///
/// # Errors
///
/// See [`solve_resolvent_eq_with`].
pub fn solve_resolvent_eq(
    lambda: f64,
    h: &SpectralField,
    g: &GramianOperator,
    sp: &LebesgueSpace,
) -> Result<ResolventSolve> {
    solve_resolvent_eq_with(lambda, h, g, sp, &ResolventOptions::default())
}

/// Solves `λz + Φ𝒥[z] = λh`.
///
/// `z − h` always lies in the span of the first `N` modes, so the unknown is
/// the coefficient vector `y` of `z = h + Σ y_n w_n`. For `p = 2` the system
/// `(λI + Φ)y = −Φh` is solved by Cholesky. Otherwise a damped fixed point
/// `y ← ½y + ½(λI+Φ)⁻¹Φ(y − P𝒥[z])` supplies a starting point for Newton's
/// method with a finite-difference Jacobian and backtracking.
///
/// # Errors
///
/// [`Error::Domain`] for `λ ≤ 0`; [`Error::Convergence`] carrying the
/// residual history if the tolerance is not met; [`Error::Accuracy`] if the
/// solution violates `‖z‖ ≤ ‖h‖(1 + 1e−9)`.
pub fn solve_resolvent_eq_with(
    lambda: f64,
    h: &SpectralField,
    g: &GramianOperator,
    sp: &LebesgueSpace,
    opts: &ResolventOptions,
) -> Result<ResolventSolve> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(alloc::format!("resolvent needs λ > 0, got {lambda}")));
    }
    let hnorm = lp_norm(h, sp);
    if hnorm == 0.0 {
        return Ok(ResolventSolve { z: h.clone(), residual: 0.0, iterations: 0, lambda });
    }
    let n = g.modes();
    let phi = g.matrix();
    let mut shifted = phi.clone();
    for i in 0..n {
        shifted[(i, i)] += lambda;
    }
    let chol = shifted
        .clone()
        .cholesky()
        .ok_or(Error::Accuracy { estimate: lambda, context: "λI + Φ not positive definite" })?;
    let make_z = |y: &DVector<f64>| {
        h.add(&SpectralField::from_coeffs(h.grid(), y.iter().copied().collect()).expect("mode count"))
    };
    // F(y) = λy + Φ P𝒥[h + y], the residual in coefficient form
    let residual_vec = |y: &DVector<f64>| -> DVector<f64> {
        let z = make_z(y);
        let pj = DVector::from_column_slice(duality_map(&z, sp).coeffs());
        y * lambda + phi * pj
    };
    let field_norm = |r: &DVector<f64>| {
        lp_norm(&SpectralField::from_coeffs(h.grid(), r.iter().copied().collect()).expect("mode count"), sp)
    };
    let target = opts.rel_tol * lambda * hnorm;

    let (y, iterations) = if sp.is_hilbert() {
        let ph = DVector::from_column_slice(h.coeffs());
        (chol.solve(&(-(phi * ph))), 1)
    } else {
        nonlinear(&chol, phi, target, opts, &residual_vec, &field_norm, h)?
    };
    let z = make_z(&y);
    let residual = field_norm(&residual_vec(&y));
    if !(residual <= target) {
        return Err(Error::Convergence {
            context: "resolvent equation",
            iterations,
            residual,
            history: alloc::vec![residual],
        });
    }
    let znorm = lp_norm(&z, sp);
    if znorm > hnorm * (1.0 + 1e-9) {
        return Err(Error::Accuracy { estimate: znorm / hnorm - 1.0, context: "resolvent bound ‖z‖ ≤ ‖h‖" });
    }
    Ok(ResolventSolve { z, residual, iterations, lambda })
}

#[allow(clippy::too_many_arguments)]
fn nonlinear(
    chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>,
    phi: &DMatrix<f64>,
    target: f64,
    opts: &ResolventOptions,
    residual_vec: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    field_norm: &dyn Fn(&DVector<f64>) -> f64,
    h: &SpectralField,
) -> Result<(DVector<f64>, usize)> {
    let n = phi.nrows();
    let mut y = DVector::<f64>::zeros(n);
    let mut r = residual_vec(&y);
    let mut rn = field_norm(&r);
    let mut history: Vec<f64> = alloc::vec![rn];
    let mut it = 0;
    // damped fixed point: y_new = (λ+Φ)⁻¹ Φ (y − P𝒥z), and F = λy + ΦP𝒥z
    // so y_new − y = −(λ+Φ)⁻¹ F
    while it < opts.fixed_point_iters && rn > target {
        let step = chol.solve(&r);
        let cand = &y - step * 0.5;
        let cr = residual_vec(&cand);
        let cn = field_norm(&cr);
        it += 1;
        if !(cn < rn) {
            break;
        }
        let slow = cn > 0.5 * rn;
        y = cand;
        r = cr;
        rn = cn;
        history.push(rn);
        if slow {
            break;
        }
    }
    let scale = h.coeff_max().max(1e-300);
    let mut newton = 0;
    while rn > 0.01 * target && newton < opts.newton_iters {
        newton += 1;
        it += 1;
        let mut jac = DMatrix::<f64>::zeros(n, n);
        let eps = 1e-6 * scale.max(y.amax());
        for k in 0..n {
            let mut yp = y.clone();
            let mut ym = y.clone();
            yp[k] += eps;
            ym[k] -= eps;
            let col = (residual_vec(&yp) - residual_vec(&ym)) / (2.0 * eps);
            jac.set_column(k, &col);
        }
        let Some(dir) = jac.lu().solve(&(-&r)) else { break };
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand = &y + &dir * t;
            let cr = residual_vec(&cand);
            let cn = field_norm(&cr);
            if cn < rn {
                y = cand;
                r = cr;
                rn = cn;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        history.push(rn);
        if !improved {
            break;
        }
    }
    if rn > target {
        return Err(Error::Convergence { context: "resolvent equation", iterations: it, residual: rn, history });
    }
    Ok((y, it))
}

/// `‖z_λ(h)‖_p` for each `λ` of a strictly decreasing positive sequence.
///
/// # Errors
///
/// [`Error::Validation`] naming `lambdas` for an invalid sequence;
/// propagated solver errors.
pub fn h0_lambda_sweep(
    h: &SpectralField,
    lambdas: &[f64],
    g: &GramianOperator,
    sp: &LebesgueSpace,
) -> Result<Vec<(f64, f64)>> {
    if lambdas.iter().any(|&l| !(l > 0.0)) || lambdas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::invalid("lambdas", "must be positive and strictly decreasing"));
    }
    lambdas.iter().map(|&l| solve_resolvent_eq(l, h, g, sp).map(|s| (l, lp_norm(&s.z, sp)))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gramian::{assemble_gramian, TimeQuadrature};
    use crate::spectral::{ControlKernel, ControlOperatorSpec, Families, FractionalParams, SpatialGrid};
    use alloc::sync::Arc;

    fn gramian(gamma: f64, modes: usize, b: Option<ControlKernel>) -> (GramianOperator, Arc<SpatialGrid>) {
        let g = Arc::new(SpatialGrid::with_modes(modes).unwrap());
        let fam = Families::new(FractionalParams::from_gamma(gamma).unwrap(), modes, 1.0).unwrap();
        let b = match b {
            None => ControlOperatorSpec::identity(&g),
            Some(k) => ControlOperatorSpec::kernel(&g, k).unwrap(),
        };
        (assemble_gramian(0.0, 1.0, &b, &fam, &TimeQuadrature::default(), &g).unwrap(), g)
    }

    #[test]
    fn zero_gramian_returns_h() {
        let (op, g) = gramian(0.75, 4, Some(ControlKernel::Zero));
        let sp = LebesgueSpace::new(4.0, g.clone()).unwrap();
        let h = SpectralField::from_coeffs(&g, alloc::vec![1.0, 0.0, -0.5, 0.2]).unwrap();
        let s = solve_resolvent_eq(0.1, &h, &op, &sp).unwrap();
        assert!(s.z.sub(&h).coeff_max() < 1e-15);
    }

    #[test]
    fn diagonal_closed_form() {
        let (op, g) = gramian(0.75, 6, None);
        let sp = LebesgueSpace::new(2.0, g.clone()).unwrap();
        let h = SpectralField::from_coeffs(&g, alloc::vec![1.0, -2.0, 0.0, 0.5, 0.0, 3.0]).unwrap();
        let lambda = 1e-3;
        let s = solve_resolvent_eq(lambda, &h, &op, &sp).unwrap();
        for (n, (z, hn)) in s.z.coeffs().iter().zip(h.coeffs()).enumerate() {
            let want = lambda / (lambda + op.diagonal()[n]) * hn;
            assert!((z - want).abs() < 1e-13 * hn.abs().max(1.0));
        }
    }

    #[test]
    fn large_lambda_returns_h() {
        let (op, g) = gramian(0.9, 4, None);
        let sp = LebesgueSpace::new(4.0, g.clone()).unwrap();
        let h = SpectralField::from_coeffs(&g, alloc::vec![0.3, 1.0, 0.0, -0.7]).unwrap();
        let lambda = 1e6 * op.matrix().norm();
        let s = solve_resolvent_eq(lambda, &h, &op, &sp).unwrap();
        assert!(s.z.sub(&h).coeff_max() < 1e-5);
    }

    #[test]
    fn nonlinear_solve_meets_tolerance() {
        let (op, g) = gramian(0.75, 8, None);
        let sp = LebesgueSpace::new(4.0, g.clone()).unwrap();
        let h = SpectralField::from_coeffs(&g, alloc::vec![1.0, 0.4, -0.3, 0.0, 0.2, 0.0, 0.0, 0.1]).unwrap();
        for lambda in [1.0, 1e-2, 1e-4, 1e-6] {
            let s = solve_resolvent_eq(lambda, &h, &op, &sp).unwrap();
            assert!(s.residual <= 1e-8 * lambda * lp_norm(&h, &sp));
            assert!(lp_norm(&s.z, &sp) <= lp_norm(&h, &sp));
        }
    }

    #[test]
    fn sweep_is_monotone_and_validated() {
        let (op, g) = gramian(0.75, 8, None);
        let sp = LebesgueSpace::new(2.0, g.clone()).unwrap();
        let h = SpectralField::from_coeffs(&g, alloc::vec![1.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.25]).unwrap();
        let lambdas = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
        let out = h0_lambda_sweep(&h, &lambdas, &op, &sp).unwrap();
        for w in out.windows(2) {
            assert!(w[1].1 <= w[0].1 * (1.0 + 1e-9));
        }
        assert!(out.last().unwrap().1 < 1e-3 * lp_norm(&h, &sp));
        assert!(h0_lambda_sweep(&h, &[1e-2, 1e-1], &op, &sp).is_err());
        let zero = h0_lambda_sweep(&SpectralField::zero(&g), &lambdas, &op, &sp).unwrap();
        assert!(zero.iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn rejects_nonpositive_lambda() {
        let (op, g) = gramian(0.75, 2, None);
        let sp = LebesgueSpace::new(2.0, g.clone()).unwrap();
        assert!(solve_resolvent_eq(0.0, &SpectralField::mode(&g, 1), &op, &sp).is_err());
    }
}
