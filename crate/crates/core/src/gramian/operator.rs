use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::TimeQuadrature;
use crate::math::{CompensatedSum, Real};
use crate::spectral::{s_factor, ControlOperatorSpec, Families, FractionalParams, SpatialGrid, SpectralField};
use crate::{Error, Result};

/// The controllability Gramian
/// `Φ_s^τ = ∫_s^τ (τ−t)^{γ−1} S_γ(τ−t) BB* S_γ(τ−t)* dt` on the mode space.
///
/// With `σ = (τ − t)^γ` the integral becomes
/// `Φ_{nm} = (BB*)_{nm} · γ⁻¹ ∫_0^{(τ−s)^γ} s_n(σ) s_m(σ) dσ`; the rule's
/// σ-nodes and the tabulated `s_n(σ_k)` are kept so that controls and
/// convolutions can be evaluated on exactly the same nodes.
#[derive(Debug, Clone)]
pub struct GramianOperator {
    interval: (f64, f64),
    gamma: f64,
    grid: Arc<SpatialGrid>,
    matrix: DMatrix<f64>,
    control: DMatrix<f64>,
    sigma: Vec<f64>,
    weights: Vec<f64>,
    // factors[k * N + (n - 1)] = s_n(σ_k)
    factors: Vec<f64>,
}

/// Assembles `Φ_s^τ` with the given time quadrature.
///
/// # Errors
///
/// [`Error::Domain`] unless `0 ≤ s < τ` and `τ − s` lies within the
/// tabulated horizon of `families`; [`Error::Validation`] if the control
/// operator lives on a different mode count.
pub fn assemble_gramian(
    s: f64,
    tau: f64,
    b: &ControlOperatorSpec,
    families: &Families,
    quad: &TimeQuadrature,
    grid: &Arc<SpatialGrid>,
) -> Result<GramianOperator> {
    if !(s >= 0.0 && s < tau) || !tau.is_finite() {
        return Err(Error::domain(alloc::format!("Gramian interval needs 0 ≤ s < τ, got [{s}, {tau}]")));
    }
    if tau - s > families.horizon() * (1.0 + 1e-12) {
        return Err(Error::domain(alloc::format!(
            "interval length {} exceeds the tabulated horizon {}",
            tau - s,
            families.horizon()
        )));
    }
    let n = grid.modes();
    if b.mode_matrix().nrows() != n || families.modes() < n {
        return Err(Error::invalid("control", "mode counts of grid, families and control differ"));
    }
    let gamma = families.gamma();
    let (sigma, weights) = quad.nodes(0.0, (tau - s).powf(gamma));
    let mut factors = Vec::with_capacity(sigma.len() * n);
    for &sg in &sigma {
        factors.extend((1..=n).map(|m| families.s_sigma(m, sg)));
    }
    let mut raw = DMatrix::<f64>::zeros(n, n);
    for (k, &w) in weights.iter().enumerate() {
        let v = &factors[k * n..(k + 1) * n];
        for i in 0..n {
            let wi = w * v[i] / gamma;
            for j in 0..=i {
                raw[(i, j)] += wi * v[j];
            }
        }
    }
    let bb = b.bb_star();
    let mut matrix = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = raw[(i, j)] * 0.5 * (bb[(i, j)] + bb[(j, i)]);
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
        }
    }
    Ok(GramianOperator {
        interval: (s, tau),
        gamma,
        grid: grid.clone(),
        matrix,
        control: b.mode_matrix().clone(),
        sigma,
        weights,
        factors,
    })
}

impl GramianOperator {
    /// `(s, τ)`.
    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    /// `γ`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Mode count `N`.
    pub fn modes(&self) -> usize {
        self.matrix.nrows()
    }

    /// The spatial grid fields are sampled on.
    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    /// The symmetric `N × N` mode matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Mode matrix `Bm` of the control operator.
    pub fn control_matrix(&self) -> &DMatrix<f64> {
        &self.control
    }

    /// Diagonal entries `Φ_n`.
    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().copied().collect()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Quadrature nodes in `σ ∈ [0, (τ−s)^γ]`.
    pub fn sigma_nodes(&self) -> &[f64] {
        &self.sigma
    }

    /// Quadrature weights matching [`sigma_nodes`](Self::sigma_nodes).
    pub fn sigma_weights(&self) -> &[f64] {
        &self.weights
    }

    /// `s_n(σ_k)` for `n = 1..=N` at node `k`.
    pub fn factors_at(&self, k: usize) -> &[f64] {
        let n = self.modes();
        &self.factors[k * n..(k + 1) * n]
    }

    /// `Φ` applied to a dual element (its samples are projected first).
    pub fn apply(&self, xstar: &SpectralField) -> SpectralField {
        let c = DVector::from_column_slice(xstar.coeffs());
        let out = &self.matrix * c;
        SpectralField::from_coeffs(&self.grid, out.iter().copied().collect()).expect("mode count matches")
    }

    /// `⟨x*, Φ x*⟩` from the matrix.
    pub fn matrix_form(&self, xstar: &SpectralField) -> f64 {
        let c = DVector::from_column_slice(xstar.coeffs());
        c.dot(&(&self.matrix * &c))
    }

    /// Smallest diagonal entry: the truncated positivity criterion for the
    /// adjoint observation (every mode is reached by the control).
    pub fn min_diagonal(&self) -> f64 {
        self.matrix.diagonal().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Checks symmetry (`1e−10`) and positive semidefiniteness (`−1e−10`),
    /// both relative to the largest entry.
    ///
    /// # Errors
    ///
    /// [`Error::Accuracy`] describing the violated invariant.
    pub fn check_invariants(&self) -> Result<()> {
        let scale = self.matrix.amax().max(f64::MIN_POSITIVE);
        let asym = (&self.matrix - self.matrix.transpose()).amax() / scale;
        if asym > 1e-10 {
            return Err(Error::Accuracy { estimate: asym, context: "Gramian symmetry" });
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0) / scale;
        if min < -1e-10 {
            return Err(Error::Accuracy { estimate: -min, context: "Gramian positive semidefiniteness" });
        }
        Ok(())
    }
}

/// `γ⁻¹ ∫ ‖B* S_γ(σ)* x*‖² dσ` by time quadrature, evaluating the mode
/// factors directly rather than through the operator's tables.
///
/// # Errors
///
/// Propagates special-function errors.
pub fn gramian_quadratic_form(
    xstar: &SpectralField,
    g: &GramianOperator,
    b: &ControlOperatorSpec,
    params: &FractionalParams,
) -> Result<f64> {
    let c = xstar.coeffs();
    if c.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let n = c.len();
    let inv = 1.0 / params.gamma;
    let mut acc = CompensatedSum::new();
    let mut sc = alloc::vec![0.0; n];
    for (&sg, &w) in g.sigma.iter().zip(&g.weights) {
        let t = sg.powf(inv);
        for m in 0..n {
            sc[m] = s_factor(params, m + 1, t) * c[m];
        }
        let obs = b.apply_adjoint_coeffs(&sc);
        acc.add(w * inv * obs.iter().map(|v| v * v).sum::<f64>());
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn setup(gamma: f64, modes: usize, horizon: f64) -> (Arc<SpatialGrid>, Families) {
        let g = Arc::new(SpatialGrid::with_modes(modes).unwrap());
        let p = FractionalParams::from_gamma(gamma).unwrap();
        (g, Families::new(p, modes, horizon).unwrap())
    }

    #[test]
    fn classical_closed_form() {
        let (g, fam) = setup(1.0, 8, PI);
        let b = ControlOperatorSpec::identity(&g);
        let op = assemble_gramian(0.0, PI, &b, &fam, &TimeQuadrature::default(), &g).unwrap();
        for (k, phi) in op.diagonal().iter().enumerate() {
            let n = (k + 1) as f64;
            assert!((phi - PI / (2.0 * n * n)).abs() < 1e-12, "n={n}");
        }
        assert!(op.matrix()[(0, 1)].abs() < 1e-15);
        op.check_invariants().unwrap();
    }

    #[test]
    fn partial_interval_closed_form() {
        let (g, fam) = setup(1.0, 4, 2.0);
        let b = ControlOperatorSpec::identity(&g);
        let op = assemble_gramian(0.5, 2.0, &b, &fam, &TimeQuadrature::default(), &g).unwrap();
        let tau = 1.5;
        for (k, phi) in op.diagonal().iter().enumerate() {
            let n = (k + 1) as f64;
            let want = (tau / 2.0 - (2.0 * n * tau).sin() / (4.0 * n)) / (n * n);
            assert!((phi - want).abs() < 1e-13);
        }
    }

    #[test]
    fn vanishing_interval() {
        let (g, fam) = setup(0.75, 4, 1.0);
        let b = ControlOperatorSpec::identity(&g);
        let op = assemble_gramian(1.0 - 1e-9, 1.0, &b, &fam, &TimeQuadrature::default(), &g).unwrap();
        assert!(op.matrix().amax() < 1e-12);
        assert!(assemble_gramian(1.0, 1.0, &b, &fam, &TimeQuadrature::default(), &g).is_err());
        assert!(assemble_gramian(0.0, 1.5, &b, &fam, &TimeQuadrature::default(), &g).is_err());
    }

    #[test]
    fn fractional_entry_matches_oracle() {
        // (1/γ)∫_0^1 (σ E_{1.5,1.5}(−σ²))² dσ at γ = 0.75, n = 1
        let (g, fam) = setup(0.75, 2, 1.0);
        let b = ControlOperatorSpec::identity(&g);
        let op = assemble_gramian(0.0, 1.0, &b, &fam, &TimeQuadrature::default(), &g).unwrap();
        assert!((op.diagonal()[0] - 0.335_895_551_087_930_83).abs() < 1e-9);
    }

    #[test]
    fn quadratic_form_two_routes() {
        let (g, fam) = setup(0.6, 5, 1.0);
        let b = ControlOperatorSpec::from_kernel_fn(&g, |z, x| (-(z - x) * (z - x)).exp()).unwrap();
        let op = assemble_gramian(0.0, 1.0, &b, &fam, &TimeQuadrature::default(), &g).unwrap();
        let x = SpectralField::from_coeffs(&g, alloc::vec![0.4, -1.0, 0.3, 0.0, 2.0]).unwrap();
        let direct = gramian_quadratic_form(&x, &op, &b, fam.params()).unwrap();
        let matrix = op.matrix_form(&x);
        assert!(direct > 0.0);
        assert!((direct - matrix).abs() < 1e-7 * matrix, "{direct} vs {matrix}");
        op.check_invariants().unwrap();
    }
}
