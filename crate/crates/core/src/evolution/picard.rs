use alloc::vec::Vec;

use super::control::ControlSignal;
use super::delay::{delay_functional_f, delay_rho, DelayContext, DelayLaw};
use super::feedback::feedback_piece;
use super::system::{Forcing, System};
use super::trajectory::Trajectory;
use crate::banach::HistorySegment;
use crate::gramian::{assemble_gramian, solve_resolvent_eq, GramianOperator, ResolventSolve};
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// Stopping rule of the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    /// Stop once `sup_t ‖x^{k+1}(t) − x^k(t)‖_p` falls below this.
    pub tol: f64,
    /// Maximum number of sweeps.
    pub max_iter: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 200 }
    }
}

/// The semilinear impulsive control problem: dynamics, delay law, initial
/// history, intermediate targets `ξ_0..ξ_p` and one Gramian
/// `Φ_{s_j}^{τ_{j+1}}` per controlled interval.
#[derive(Debug, Clone)]
pub struct ControlProblem {
    system: System,
    delay: DelayLaw,
    history: HistorySegment,
    targets: Vec<SpectralField>,
    gramians: Vec<GramianOperator>,
}

impl ControlProblem {
    /// Assembles the Gramians. When `targets` has a single entry it is taken
    /// as `ξ_p`, and `ξ_j` for `j < p` default to the free evolution at
    /// `τ_{j+1}`.
    ///
    /// # Errors
    ///
    /// [`Error::Validation`] if `ψ(0)` disagrees with the system's initial
    /// state, the delay weight differs from the history's, or the target
    /// count is neither `1` nor `p + 1`; propagated assembly errors.
    pub fn new(system: System, delay: DelayLaw, history: HistorySegment, targets: Vec<SpectralField>) -> Result<Self> {
        if history.at_zero().band_limited().sub(system.initial()).coeff_max() > 1e-12 {
            return Err(Error::invalid("initial", "ψ(0) of the history differs from the initial state"));
        }
        if history.weight_rate() != delay.weight_rate() {
            return Err(Error::invalid("delay.a", "history and delay law use different weights"));
        }
        let sched = system.schedule();
        let p = sched.count();
        let gramians = (0..=p)
            .map(|j| {
                let (a, b) = sched.active_interval(j);
                assemble_gramian(a, b, system.control(), system.families(), system.quadrature(), system.grid())
            })
            .collect::<Result<Vec<_>>>()?;
        let mut problem = Self { system, delay, history, targets: Vec::new(), gramians };
        problem.targets = match targets.len() {
            1 if p > 0 => {
                let free = problem.free_trajectory()?;
                let mut t: Vec<SpectralField> =
                    (0..p).map(|j| free.state_at(problem.system.schedule().tau(j + 1))).collect::<Result<_>>()?;
                t.push(targets[0].clone());
                t
            }
            n if n == p + 1 => targets,
            n => return Err(Error::invalid("targets", alloc::format!("{n} targets for {p} impulses"))),
        };
        Ok(problem)
    }

    /// The dynamics.
    pub fn system(&self) -> &System {
        &self.system
    }

    /// The delay law.
    pub fn delay(&self) -> &DelayLaw {
        &self.delay
    }

    /// The initial history `ψ`.
    pub fn history(&self) -> &HistorySegment {
        &self.history
    }

    /// `ξ_0..ξ_p`.
    pub fn targets(&self) -> &[SpectralField] {
        &self.targets
    }

    /// `Φ_{s_j}^{τ_{j+1}}`, `j = 0..=p`.
    pub fn gramians(&self) -> &[GramianOperator] {
        &self.gramians
    }

    /// `f(0, ψ)`.
    pub fn initial_forcing(&self) -> SpectralField {
        let rho = delay_rho(0.0, &self.history, &self.delay, self.system.space());
        delay_functional_f(&self.history.shifted(rho), &self.delay)
    }

    /// The uncontrolled trajectory with `f` frozen at `f(0, ψ)`: the Picard
    /// starting point.
    ///
    /// # Errors
    ///
    /// Propagated evaluation errors.
    pub fn free_trajectory(&self) -> Result<Trajectory> {
        let forcing = (!self.delay.is_none()).then(|| Forcing::constant(&self.system, self.initial_forcing().coeffs()));
        self.system.evaluate_mild(&ControlSignal::zero(1.0), forcing.as_ref(), None)
    }

    /// Forcing samples `f(t, x_{ϱ(t, x_t)})` along a trajectory.
    pub fn delayed_forcing(&self, x: &Trajectory) -> Option<Forcing> {
        if self.delay.is_none() {
            return None;
        }
        let ctx = DelayContext::new(x, &self.history, &self.delay);
        let sp = self.system.space();
        Some(Forcing::from_fn(&self.system, |p, i, t| ctx.forcing(t, &x.pieces()[p].states[i], sp)))
    }
}

/// The control `u_λ` steering through `ξ_0..ξ_p` given the current iterate
/// (through `x(τ_j⁻)`) and forcing samples.
///
/// `g_0 = ξ_0 − C_γ(τ₁)ψ(0) − T_γ(τ₁)η − I(τ₁)` and, for `j ≥ 1`,
/// `g_j = ξ_j − C_γ(τ_{j+1}−s_j)h_j − T_γ(τ_{j+1}−s_j)h'_j + I(s_j) − I(τ_{j+1})`,
/// where `I` collects the forcing and the controls of the earlier intervals.
/// Then `u = B*S_γ(τ_{j+1}−t)*𝒥[R(λ, Φ_{s_j}^{τ_{j+1}}) g_j]` on each interval.
///
/// # Errors
///
/// Propagated resolvent errors.
pub fn impulsive_control(
    problem: &ControlProblem,
    lambda: f64,
    iterate: &Trajectory,
    forcing: Option<&Forcing>,
) -> Result<(ControlSignal, Vec<ResolventSolve>)> {
    let sys = &problem.system;
    let sched = sys.schedule();
    let mut u = ControlSignal::zero(lambda);
    let mut solves = Vec::with_capacity(sched.count() + 1);
    for j in 0..=sched.count() {
        let (start, end) = sched.active_interval(j);
        let left = if j > 0 { Some(iterate.state_at(sched.tau(j))?) } else { None };
        let base = sys.interval_base(j, left.as_ref());
        let hi = sys.convolution(&u, forcing, end);
        let lo = if j > 0 { sys.convolution(&u, forcing, start) } else { alloc::vec![0.0; sys.modes()] };
        let xi = problem.targets[j].band_limited();
        let g: Vec<f64> = (0..sys.modes()).map(|m| xi.coeffs()[m] - base[m] - hi[m] + lo[m]).collect();
        let sol = solve_resolvent_eq(lambda, &sys.field(g), &problem.gramians[j], sys.space())?;
        u.pieces.push(feedback_piece(&sol, start, end, sys));
        solves.push(sol);
    }
    Ok((u, solves))
}

/// Result of the fixed-point iteration.
#[derive(Debug, Clone)]
pub struct PicardOutcome {
    /// The converged trajectory.
    pub trajectory: Trajectory,
    /// The control of the last sweep.
    pub control: ControlSignal,
    /// Number of sweeps.
    pub iterations: usize,
    /// Last sup-norm change.
    pub delta: f64,
    /// Changes of every sweep.
    pub deltas: Vec<f64>,
    /// Resolvent solves of the last sweep.
    pub solves: Vec<ResolventSolve>,
}

/// Successive substitution `x^{k+1} = F_λ(x^k)` from the free trajectory.
///
/// With no delayed forcing and no impulses `F_λ` does not depend on `x`, so
/// a single sweep is exact (reported as one iteration with zero change).
///
/// # Errors
///
/// [`Error::Convergence`] carrying the change history after `max_iter`
/// sweeps; propagated solver errors.
pub fn picard_solve(problem: &ControlProblem, lambda: f64, opts: &PicardOptions) -> Result<PicardOutcome> {
    let sys = &problem.system;
    let mut x = problem.free_trajectory()?;
    if problem.delay.is_none() && sys.schedule().count() == 0 {
        let (control, solves) = impulsive_control(problem, lambda, &x, None)?;
        let trajectory = sys.evaluate_mild(&control, None, None)?;
        return Ok(PicardOutcome { trajectory, control, iterations: 1, delta: 0.0, deltas: alloc::vec![0.0], solves });
    }
    let mut deltas = Vec::new();
    for k in 1..=opts.max_iter {
        let forcing = problem.delayed_forcing(&x);
        let (control, solves) = impulsive_control(problem, lambda, &x, forcing.as_ref())?;
        let anchors: Vec<SpectralField> =
            (1..=sys.schedule().count()).map(|j| x.state_at(sys.schedule().tau(j))).collect::<Result<_>>()?;
        let next = sys.evaluate_mild(&control, forcing.as_ref(), Some(&anchors))?;
        let delta = next.sup_distance(&x, sys.space())?;
        deltas.push(delta);
        x = next;
        if delta < opts.tol {
            return Ok(PicardOutcome { trajectory: x, control, iterations: k, delta, deltas, solves });
        }
    }
    Err(Error::Convergence {
        context: "Picard iteration",
        iterations: opts.max_iter,
        residual: deltas.last().copied().unwrap_or(f64::NAN),
        history: deltas,
    })
}
