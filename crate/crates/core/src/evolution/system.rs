use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::control::ControlSignal;
use super::schedule::{impulse_derivative, impulse_value, ImpulseSchedule};
use super::trajectory::{PieceKind, Trajectory, TrajectoryPiece};
use crate::banach::LebesgueSpace;
use crate::gramian::TimeQuadrature;
use crate::math::{linspace, Real};
use crate::specfun::GaussLegendre;
use crate::spectral::{ControlOperatorSpec, Families, SpatialGrid, SpectralField};
use crate::{Error, Result};

/// Sampling density of trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    /// Uniform steps per unit time on controlled intervals.
    pub steps_per_unit: f64,
    /// Samples on each impulse interval (endpoints included).
    pub impulse_samples: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { steps_per_unit: 512.0, impulse_samples: 64 }
    }
}

impl TimeGrid {
    /// # Errors
    ///
    /// [`Error::Validation`] for non-positive densities.
    pub fn validate(&self) -> Result<()> {
        if !(self.steps_per_unit > 0.0) || !self.steps_per_unit.is_finite() {
            return Err(Error::invalid("numerics.steps_per_unit", "must be positive"));
        }
        if self.impulse_samples < 2 {
            return Err(Error::invalid("numerics.impulse_samples", "must be at least 2"));
        }
        Ok(())
    }
}

/// Sample times of one trajectory piece.
#[derive(Debug, Clone, PartialEq)]
pub struct PieceLayout {
    /// Dynamics on the piece.
    pub kind: PieceKind,
    /// Interval index `j`.
    pub index: usize,
    /// Sample times, endpoints included.
    pub times: Vec<f64>,
}

/// Forcing samples `F(t)` (mode coefficients) aligned with a system's layout;
/// the forcing is linear between samples of the same piece and never
/// interpolated across piece boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Forcing {
    pieces: Vec<Vec<Vec<f64>>>,
}

impl Forcing {
    /// Samples `f(piece, sample, t)` on every layout time.
    pub fn from_fn(sys: &System, mut f: impl FnMut(usize, usize, f64) -> Vec<f64>) -> Self {
        let pieces = sys
            .layout
            .iter()
            .enumerate()
            .map(|(p, pl)| pl.times.iter().enumerate().map(|(i, &t)| f(p, i, t)).collect())
            .collect();
        Self { pieces }
    }

    /// `F ≡ c`.
    pub fn constant(sys: &System, c: &[f64]) -> Self {
        Self::from_fn(sys, |_, _, _| c.to_vec())
    }

    /// Raw samples per piece.
    pub fn pieces(&self) -> &[Vec<Vec<f64>>] {
        &self.pieces
    }
}

/// Everything needed to evaluate mild solutions of the controlled system:
/// the mode space, the families, `B`, the schedule, the initial data
/// `ψ(0)`, `η`, and the discretization.
#[derive(Debug, Clone)]
pub struct System {
    grid: Arc<SpatialGrid>,
    space: LebesgueSpace,
    families: Families,
    control: ControlOperatorSpec,
    bb_star: DMatrix<f64>,
    schedule: ImpulseSchedule,
    initial: SpectralField,
    velocity: SpectralField,
    quad: TimeQuadrature,
    time_grid: TimeGrid,
    layout: Vec<PieceLayout>,
    gauss: GaussLegendre,
}

impl System {
    /// # Errors
    ///
    /// [`Error::Validation`] if the families do not cover the mode count or
    /// the horizon, or the time grid is invalid.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        space: LebesgueSpace,
        families: Families,
        control: ControlOperatorSpec,
        schedule: ImpulseSchedule,
        initial: SpectralField,
        velocity: SpectralField,
        quad: TimeQuadrature,
        time_grid: TimeGrid,
    ) -> Result<Self> {
        time_grid.validate()?;
        let grid = space.grid().clone();
        let n = grid.modes();
        if families.modes() < n || control.mode_matrix().nrows() != n {
            return Err(Error::invalid("grid.modes", "families, control and grid disagree on the mode count"));
        }
        if families.horizon() < schedule.horizon() * (1.0 - 1e-12) {
            return Err(Error::invalid("time.horizon", "families are tabulated on a shorter horizon"));
        }
        let mut layout = Vec::new();
        for j in 0..=schedule.count() {
            if j > 0 {
                let (a, b) = schedule.impulse_interval(j);
                layout.push(PieceLayout {
                    kind: PieceKind::Impulse,
                    index: j,
                    times: linspace(a, b, time_grid.impulse_samples),
                });
            }
            let (a, b) = schedule.active_interval(j);
            let m = (((b - a) * time_grid.steps_per_unit).ceil() as usize).max(1);
            layout.push(PieceLayout { kind: PieceKind::Active, index: j, times: linspace(a, b, m + 1) });
        }
        let bb_star = control.bb_star();
        Ok(Self {
            grid,
            space,
            families,
            control,
            bb_star,
            schedule,
            initial: initial.band_limited(),
            velocity: velocity.band_limited(),
            quad,
            time_grid,
            layout,
            gauss: GaussLegendre::new(4),
        })
    }

    /// The spatial grid.
    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    /// The state space `L^p`.
    pub fn space(&self) -> &LebesgueSpace {
        &self.space
    }

    /// The mode-factor tables.
    pub fn families(&self) -> &Families {
        &self.families
    }

    /// `B`.
    pub fn control(&self) -> &ControlOperatorSpec {
        &self.control
    }

    /// The impulse schedule.
    pub fn schedule(&self) -> &ImpulseSchedule {
        &self.schedule
    }

    /// `ψ(0)`.
    pub fn initial(&self) -> &SpectralField {
        &self.initial
    }

    /// `η`.
    pub fn velocity(&self) -> &SpectralField {
        &self.velocity
    }

    /// The time quadrature shared with the Gramians.
    pub fn quadrature(&self) -> &TimeQuadrature {
        &self.quad
    }

    /// The sampling density.
    pub fn time_grid(&self) -> &TimeGrid {
        &self.time_grid
    }

    /// Sample times per piece.
    pub fn layout(&self) -> &[PieceLayout] {
        &self.layout
    }

    /// Final time `T`.
    pub fn horizon(&self) -> f64 {
        self.schedule.horizon()
    }

    /// Mode count `N`.
    pub fn modes(&self) -> usize {
        self.grid.modes()
    }

    /// A field from mode coefficients.
    pub fn field(&self, coeffs: Vec<f64>) -> SpectralField {
        SpectralField::from_coeffs(&self.grid, coeffs).expect("coefficient count equals the mode count")
    }

    /// A copy with other initial data.
    pub fn with_initial_data(&self, initial: SpectralField, velocity: SpectralField) -> Self {
        Self { initial: initial.band_limited(), velocity: velocity.band_limited(), ..self.clone() }
    }

    /// `C_γ(t)ψ(0) + T_γ(t)η`.
    pub fn free_state(&self, t: f64) -> Vec<f64> {
        let (psi, eta) = (self.initial.coeffs(), self.velocity.coeffs());
        (0..self.modes()).map(|m| self.families.c(m + 1, t) * psi[m] + self.families.tt(m + 1, t) * eta[m]).collect()
    }

    /// `C_γ(t − s_j) h + T_γ(t − s_j) h'`.
    pub(crate) fn restart_state(&self, j: usize, t: f64, h: &SpectralField, hp: &SpectralField) -> Vec<f64> {
        let dt = t - self.schedule.s(j);
        (0..self.modes())
            .map(|m| self.families.c(m + 1, dt) * h.coeffs()[m] + self.families.tt(m + 1, dt) * hp.coeffs()[m])
            .collect()
    }

    /// `∫_0^t (t−s)^{γ−1} S_γ(t−s) F(s) ds` for piecewise-linear forcing,
    /// four Gauss points in `σ = (t−s)^γ` per sample interval.
    pub(crate) fn conv_forcing(&self, f: &Forcing, t: f64) -> Vec<f64> {
        let n = self.modes();
        let gamma = self.families.gamma();
        let inv = 1.0 / gamma;
        let mut out = alloc::vec![0.0; n];
        let mut fb = alloc::vec![0.0; n];
        for (pl, fp) in self.layout.iter().zip(&f.pieces) {
            let ts = &pl.times;
            if ts[0] >= t {
                break;
            }
            for i in 0..ts.len() - 1 {
                let a = ts[i];
                if a >= t {
                    break;
                }
                let b = ts[i + 1].min(t);
                let fa = &fp[i];
                if ts[i + 1] <= t {
                    fb.copy_from_slice(&fp[i + 1]);
                } else {
                    let w = (t - a) / (ts[i + 1] - a);
                    for m in 0..n {
                        fb[m] = (1.0 - w) * fa[m] + w * fp[i + 1][m];
                    }
                }
                let (sa, sb) = ((t - a).powf(gamma), (t - b).powf(gamma));
                for (sq, wq) in self.gauss.mapped(sb, sa) {
                    let s = t - sq.powf(inv);
                    let lam = ((s - a) / (b - a)).clamp(0.0, 1.0);
                    let wt = wq * inv;
                    for m in 0..n {
                        out[m] += wt * self.families.s_sigma(m + 1, sq) * ((1.0 - lam) * fa[m] + lam * fb[m]);
                    }
                }
            }
        }
        out
    }

    /// `∫_0^t (t−s)^{γ−1} S_γ(t−s) B u(s) ds` with the time quadrature in
    /// `σ`; at `t = end` of a piece this uses exactly the Gramian's nodes.
    pub(crate) fn conv_control(&self, u: &ControlSignal, t: f64) -> Vec<f64> {
        let n = self.modes();
        let gamma = self.families.gamma();
        let inv = 1.0 / gamma;
        let identity = self.control.is_identity();
        let mut out = alloc::vec![0.0; n];
        let mut v = alloc::vec![0.0; n];
        for piece in &u.pieces {
            if piece.start >= t {
                continue;
            }
            let hi = piece.end.min(t);
            let (nodes, weights) = self.quad.nodes((t - hi).powf(gamma), (t - piece.start).powf(gamma));
            for (&sg, &w) in nodes.iter().zip(&weights) {
                let to_end = piece.end - t + sg.powf(inv);
                for m in 0..n {
                    v[m] = self.families.s(m + 1, to_end) * piece.zeta[m];
                }
                let wt = w * inv;
                if identity {
                    for m in 0..n {
                        out[m] += wt * self.families.s_sigma(m + 1, sg) * v[m];
                    }
                } else {
                    for r in 0..n {
                        let bu: f64 = (0..n).map(|k| self.bb_star[(r, k)] * v[k]).sum();
                        out[r] += wt * self.families.s_sigma(r + 1, sg) * bu;
                    }
                }
            }
        }
        if let Some(p) = &u.perturbation {
            let (nodes, weights) = self.quad.nodes(0.0, t.powf(gamma));
            for (&sg, &w) in nodes.iter().zip(&weights) {
                let du = p.at(t - sg.powf(inv));
                let bu = self.control.apply_coeffs(&du);
                for m in 0..n {
                    out[m] += w * inv * self.families.s_sigma(m + 1, sg) * bu[m];
                }
            }
        }
        out
    }

    /// The full convolution term `I(t)` for control `u` and forcing `f`.
    pub fn convolution(&self, u: &ControlSignal, f: Option<&Forcing>, t: f64) -> Vec<f64> {
        let mut out = self.conv_control(u, t);
        if let Some(f) = f {
            for (o, v) in out.iter_mut().zip(self.conv_forcing(f, t)) {
                *o += v;
            }
        }
        out
    }

    fn check_inputs(&self, f: Option<&Forcing>, anchors: Option<&[SpectralField]>) -> Result<()> {
        if let Some(f) = f {
            let aligned = f.pieces.len() == self.layout.len()
                && f.pieces
                    .iter()
                    .zip(&self.layout)
                    .all(|(fp, pl)| fp.len() == pl.times.len() && fp.iter().all(|v| v.len() == self.modes()));
            if !aligned {
                return Err(Error::invalid("forcing", "samples are not aligned with the trajectory layout"));
            }
        }
        if let Some(a) = anchors {
            if a.len() != self.schedule.count() {
                return Err(Error::invalid("anchors", "need one left limit per impulse"));
            }
        }
        Ok(())
    }

    /// State on controlled interval `j` at time `t`, given `x(τ_j⁻)`.
    fn active_state(
        &self,
        j: usize,
        t: f64,
        u: &ControlSignal,
        f: Option<&Forcing>,
        left: Option<&SpectralField>,
        restart: Option<&(SpectralField, SpectralField, Vec<f64>)>,
    ) -> Vec<f64> {
        let conv = self.convolution(u, f, t);
        if j == 0 {
            return self.free_state(t).iter().zip(&conv).map(|(a, b)| a + b).collect();
        }
        let owned;
        let (h, hp, at_s) = match restart {
            Some((h, hp, c)) => (h, hp, c),
            None => {
                let left = left.expect("left limit");
                owned = self.restart_data(j, u, f, left);
                (&owned.0, &owned.1, &owned.2)
            }
        };
        self.restart_state(j, t, h, hp).iter().zip(&conv).zip(at_s).map(|((a, b), c)| a + b - c).collect()
    }

    fn restart_data(
        &self,
        j: usize,
        u: &ControlSignal,
        f: Option<&Forcing>,
        left: &SpectralField,
    ) -> (SpectralField, SpectralField, Vec<f64>) {
        let s = self.schedule.s(j);
        (
            impulse_value(j, s, left, &self.schedule),
            impulse_derivative(j, left, &self.schedule),
            self.convolution(u, f, s),
        )
    }

    /// The mild solution on every layout sample.
    ///
    /// `anchors[j−1]`, when given, replaces the computed `x(τ_j⁻)` inside the
    /// impulse maps (this is how the Picard map feeds in its iterate).
    ///
    /// # Errors
    ///
    /// [`Error::Validation`] for misaligned forcing or anchors.
    pub fn evaluate_mild(
        &self,
        u: &ControlSignal,
        f: Option<&Forcing>,
        anchors: Option<&[SpectralField]>,
    ) -> Result<Trajectory> {
        self.check_inputs(f, anchors)?;
        let mut pieces: Vec<TrajectoryPiece> = Vec::with_capacity(self.layout.len());
        let mut left: Option<SpectralField> = None;
        for pl in &self.layout {
            let j = pl.index;
            let states: Vec<SpectralField> = match pl.kind {
                PieceKind::Impulse => {
                    let computed = pieces.last().expect("impulses follow a controlled piece").states.last().unwrap();
                    let l = anchors.map_or_else(|| computed.clone(), |a| a[j - 1].clone());
                    let out = pl.times.iter().map(|&t| impulse_value(j, t, &l, &self.schedule)).collect();
                    left = Some(l);
                    out
                }
                PieceKind::Active => {
                    let restart = (j > 0).then(|| self.restart_data(j, u, f, left.as_ref().unwrap()));
                    pl.times
                        .iter()
                        .map(|&t| self.field(self.active_state(j, t, u, f, None, restart.as_ref())))
                        .collect()
                }
            };
            pieces.push(TrajectoryPiece { kind: pl.kind, index: j, times: pl.times.clone(), states });
        }
        Trajectory::new(pieces)
    }

    /// `x(T)` only, evaluating the convolution at the few times it is needed.
    ///
    /// # Errors
    ///
    /// As [`evaluate_mild`](Self::evaluate_mild).
    pub fn evaluate_terminal(
        &self,
        u: &ControlSignal,
        f: Option<&Forcing>,
        anchors: Option<&[SpectralField]>,
    ) -> Result<SpectralField> {
        self.check_inputs(f, anchors)?;
        let p = self.schedule.count();
        let mut left: Option<SpectralField> = None;
        for j in 0..=p {
            let end = self.schedule.tau(j + 1);
            let x = self.field(self.active_state(j, end, u, f, left.as_ref(), None));
            if j == p {
                return Ok(x);
            }
            left = Some(anchors.map_or(x, |a| a[j].clone()));
        }
        unreachable!("loop returns on the last interval")
    }

    /// `x(τ_{j+1})` on controlled interval `j`, given `x(τ_j⁻)` for `j ≥ 1`.
    pub(crate) fn interval_base(&self, j: usize, left: Option<&SpectralField>) -> Vec<f64> {
        let end = self.schedule.tau(j + 1);
        if j == 0 {
            return self.free_state(end);
        }
        let left = left.expect("left limit for j ≥ 1");
        let s = self.schedule.s(j);
        let h = impulse_value(j, s, left, &self.schedule);
        let hp = impulse_derivative(j, left, &self.schedule);
        self.restart_state(j, end, &h, &hp)
    }
}

/// The mild solution for control `u` and forcing samples `f`.
///
/// # Errors
///
/// See [`System::evaluate_mild`].
pub fn evaluate_mild(sys: &System, u: &ControlSignal, f: Option<&Forcing>) -> Result<Trajectory> {
    sys.evaluate_mild(u, f, None)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::evolution::ImpulseKernel;
    use crate::spectral::{c_factor, t_factor, FractionalParams};

    pub(crate) fn system(gamma: f64, modes: usize, horizon: f64, steps: f64, sched: ImpulseSchedule) -> System {
        let g = Arc::new(SpatialGrid::with_modes(modes).unwrap());
        let sp = LebesgueSpace::new(2.0, g.clone()).unwrap();
        let fam = Families::new(FractionalParams::from_gamma(gamma).unwrap(), modes, horizon).unwrap();
        System::new(
            sp,
            fam,
            ControlOperatorSpec::identity(&g),
            sched,
            SpectralField::zero(&g),
            SpectralField::zero(&g),
            TimeQuadrature::default(),
            TimeGrid { steps_per_unit: steps, impulse_samples: 16 },
        )
        .unwrap()
    }

    #[test]
    fn classical_free_waves() {
        let sys = system(1.0, 4, 2.0, 32.0, ImpulseSchedule::empty(2.0).unwrap());
        let psi = sys.field(alloc::vec![1.0, 0.0, -0.5, 0.2]);
        let eta = sys.field(alloc::vec![0.0, 0.3, 1.0, 0.0]);
        let sys = sys.with_initial_data(psi.clone(), eta.clone());
        let x = sys.evaluate_mild(&ControlSignal::zero(1.0), None, None).unwrap();
        for (t, state) in x.samples() {
            for n in 1..=4 {
                let nf = n as f64;
                let want = (nf * t).cos() * psi.coeffs()[n - 1] + (nf * t).sin() / nf * eta.coeffs()[n - 1];
                assert!((state.coeffs()[n - 1] - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fractional_free_modes() {
        let gamma = 0.75;
        let sys = system(gamma, 3, 1.0, 16.0, ImpulseSchedule::empty(1.0).unwrap());
        let sys = sys.with_initial_data(sys.field(alloc::vec![1.0, 0.5, 0.0]), sys.field(alloc::vec![0.0, 1.0, 2.0]));
        let x = sys.evaluate_terminal(&ControlSignal::zero(1.0), None, None).unwrap();
        let p = FractionalParams::from_gamma(gamma).unwrap();
        for n in 1..=3 {
            let want = c_factor(&p, n, 1.0) * sys.initial().coeffs()[n - 1]
                + t_factor(&p, n, 1.0) * sys.velocity().coeffs()[n - 1];
            assert!((x.coeffs()[n - 1] - want).abs() < 1e-10);
        }
    }

    fn forced_terminal(gamma: f64, steps: f64) -> f64 {
        let sys = system(gamma, 2, 1.0, steps, ImpulseSchedule::empty(1.0).unwrap());
        let f = Forcing::from_fn(&sys, |_, _, t| alloc::vec![(3.0 * t).sin(), 0.0]);
        sys.evaluate_terminal(&ControlSignal::zero(1.0), Some(&f), None).unwrap().coeffs()[0]
    }

    #[test]
    fn classical_forced_oscillator() {
        // x'' + x = sin 3t, x(0) = x'(0) = 0
        let want = (3.0 * 1.0f64.sin() - 3.0f64.sin()) / 8.0;
        let err = (forced_terminal(1.0, 128.0) - want).abs();
        assert!(err < 2e-5, "{err}");
    }

    #[test]
    fn self_convergence_is_second_order() {
        let reference = forced_terminal(0.75, 2048.0);
        let e1 = (forced_terminal(0.75, 32.0) - reference).abs();
        let e2 = (forced_terminal(0.75, 64.0) - reference).abs();
        assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn terminal_path_matches_full_evaluation() {
        let sched = ImpulseSchedule::new(
            alloc::vec![0.4, 0.55],
            1.0,
            alloc::vec![ImpulseKernel::Trig { amplitude: 0.2, rate: 0.5, wavenumber: 2, z_frequency: 1.0 }],
            3,
        )
        .unwrap();
        let sys = system(0.8, 3, 1.0, 64.0, sched);
        let sys = sys.with_initial_data(sys.field(alloc::vec![1.0, 0.0, 0.3]), sys.field(alloc::vec![0.0, 0.5, 0.0]));
        let f = Forcing::from_fn(&sys, |_, _, t| alloc::vec![t.cos(), 0.0, 0.1]);
        let u = ControlSignal {
            lambda: 1.0,
            pieces: alloc::vec![
                crate::evolution::ControlPiece { start: 0.0, end: 0.4, zeta: alloc::vec![1.0, -1.0, 0.5] },
                crate::evolution::ControlPiece { start: 0.55, end: 1.0, zeta: alloc::vec![0.0, 2.0, 0.0] },
            ],
            perturbation: None,
        };
        let x = sys.evaluate_mild(&u, Some(&f), None).unwrap();
        let xt = sys.evaluate_terminal(&u, Some(&f), None).unwrap();
        assert!(x.terminal().sub(&xt).coeff_max() < 1e-13);
        // the state after the impulse interval restarts from h₁(s₁)
        let left = x.state_at(0.4).unwrap();
        let h = impulse_value(1, 0.55, &left, sys.schedule());
        assert!(x.state_at(0.55).unwrap().sub(&h).coeff_max() < 1e-14);
        assert_eq!(x.pieces().len(), 3);
        // misaligned forcing is rejected
        let bad = Forcing { pieces: alloc::vec![] };
        assert!(sys.evaluate_mild(&u, Some(&bad), None).is_err());
    }
}
