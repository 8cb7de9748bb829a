//! A complete problem description and its validated, assembled form.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::banach::{lp_norm, phase_norm, theta_min_for, HistorySegment, LebesgueSpace, PhaseConstants};
use crate::evolution::{
    bounds_nj_cj, cnd_check, BoundsInputs, CndInputs, ControlProblem, DelayBeta, DelayLaw, ImpulseKernel,
    ImpulseSchedule, MemoryKernel, PicardOptions, System, TimeGrid,
};
use crate::gramian::TimeQuadrature;
use crate::math::Real;
use crate::spectral::{ControlKernel, ControlOperatorSpec, Families, FractionalParams, SpatialGrid, SpectralField};
use crate::{Error, Result};

/// Which control operator to use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlChoice {
    /// `B = I`.
    Identity,
    /// An integral operator with a registry kernel.
    Kernel(ControlKernel),
}

/// Plain, unvalidated scenario parameters with documented defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// `α ∈ (1, 2]` (default 1.5, i.e. `γ = 0.75`).
    pub alpha: f64,
    /// Mode count `N` (default 32).
    pub modes: usize,
    /// Grid points (default `4N + 1`).
    pub points: Option<usize>,
    /// Exponent `p` of `L^p` (default 2).
    pub p: f64,
    /// Horizon `T` (default 1).
    pub horizon: f64,
    /// Control operator (default identity).
    pub control: ControlChoice,
    /// `[τ₁, s₁, τ₂, s₂, …]` (default none).
    pub breakpoints: Vec<f64>,
    /// Kernel shared by every impulse.
    pub impulse: ImpulseKernel,
    /// Memory kernel `b` (default none).
    pub memory: MemoryKernel,
    /// Delay magnitude `β` (default zero).
    pub beta: DelayBeta,
    /// Weight rate `a < 0` (default −0.5).
    pub weight_rate: f64,
    /// History truncation tolerance (default 1e−10).
    pub tail_tol: f64,
    /// `ψ(θ) = e^{μθ} Σ c_n w_n`: the coefficients `c_n` (default `[1]`).
    pub psi_modes: Vec<f64>,
    /// `μ ≥ 0` (default 1).
    pub psi_rate: f64,
    /// Mode coefficients of `η` (default none).
    pub eta_modes: Vec<f64>,
    /// Mode coefficients of the terminal target `ξ_p` (default zero).
    pub target_modes: Vec<f64>,
    /// Optional `ξ_0..ξ_{p−1}`; free-evolution values when empty.
    pub intermediate_targets: Vec<Vec<f64>>,
    /// Strictly decreasing `λ` values.
    pub lambdas: Vec<f64>,
    /// Time-quadrature panels per unit `σ` (default 64).
    pub panels_per_unit: f64,
    /// Gauss points per panel (default 8).
    pub gauss_order: usize,
    /// Trajectory steps per unit time (default 512).
    pub steps_per_unit: f64,
    /// Samples per impulse interval (default 64).
    pub impulse_samples: usize,
    /// History nodes on `[θ_min, 0]` (default 2001).
    pub history_nodes: usize,
    /// Picard tolerance (default 1e−8).
    pub picard_tol: f64,
    /// Picard sweep limit (default 200).
    pub picard_max_iter: usize,
    /// Seed for randomized diagnostics.
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            modes: 32,
            points: None,
            p: 2.0,
            horizon: 1.0,
            control: ControlChoice::Identity,
            breakpoints: Vec::new(),
            impulse: ImpulseKernel::Zero,
            memory: MemoryKernel::None,
            beta: DelayBeta::Zero,
            weight_rate: -0.5,
            tail_tol: 1e-10,
            psi_modes: alloc::vec![1.0],
            psi_rate: 1.0,
            eta_modes: Vec::new(),
            target_modes: Vec::new(),
            intermediate_targets: Vec::new(),
            lambdas: alloc::vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            panels_per_unit: 64.0,
            gauss_order: 8,
            steps_per_unit: 512.0,
            impulse_samples: 64,
            history_nodes: 2001,
            picard_tol: 1e-8,
            picard_max_iter: 200,
            seed: 0,
        }
    }
}

/// Runtime readings of the standing assumptions.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    /// Smallest diagonal Gramian entry over the controlled intervals; the
    /// truncated non-degeneracy criterion needs it positive.
    pub min_gramian_diagonal: f64,
    /// The memory certificate `L` bounding `‖f(t, ψ)‖ ≤ L‖ψ‖_B`.
    pub memory_bound: f64,
    /// `κ_j` per impulse.
    pub kappa: Vec<f64>,
    /// `ϑ_j` per impulse.
    pub theta: Vec<f64>,
}

/// A validated scenario with every operator assembled.
#[derive(Debug, Clone)]
pub struct Scenario {
    config: ScenarioConfig,
    problem: ControlProblem,
    phase: PhaseConstants,
}

fn field_from(grid: &Arc<SpatialGrid>, modes: &[f64], key: &str) -> Result<SpectralField> {
    if modes.len() > grid.modes() {
        return Err(Error::invalid(key, alloc::format!("{} coefficients for {} modes", modes.len(), grid.modes())));
    }
    if modes.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid(key, "coefficients must be finite"));
    }
    let mut c = modes.to_vec();
    c.resize(grid.modes(), 0.0);
    SpectralField::from_coeffs(grid, c)
}

impl Scenario {
    /// Validates the configuration and assembles the problem.
    ///
    /// # Errors
    ///
    /// [`Error::Validation`] naming the offending key; propagated assembly
    /// errors.
    pub fn build(cfg: &ScenarioConfig) -> Result<Self> {
        let params = FractionalParams::new(cfg.alpha)?;
        if cfg.modes == 0 {
            return Err(Error::invalid("grid.modes", "must be at least 1"));
        }
        let grid = Arc::new(match cfg.points {
            Some(n) => SpatialGrid::new(cfg.modes, n)?,
            None => SpatialGrid::with_modes(cfg.modes)?,
        });
        let space = LebesgueSpace::new(cfg.p, grid.clone())?;
        if !(cfg.horizon > 0.0) || !cfg.horizon.is_finite() {
            return Err(Error::invalid("time.horizon", "must be positive and finite"));
        }
        let control = match cfg.control {
            ControlChoice::Identity => ControlOperatorSpec::identity(&grid),
            ControlChoice::Kernel(k) => ControlOperatorSpec::kernel(&grid, k)?,
        };
        let p = cfg.breakpoints.len() / 2;
        let schedule =
            ImpulseSchedule::new(cfg.breakpoints.clone(), cfg.horizon, alloc::vec![cfg.impulse; p], cfg.modes)?;
        let delay = DelayLaw::new(cfg.memory, cfg.beta, cfg.weight_rate)?;
        if !(cfg.tail_tol > 0.0) {
            return Err(Error::invalid("delay.tail_tol", "must be positive"));
        }
        if !(cfg.psi_rate >= 0.0) || !cfg.psi_rate.is_finite() {
            return Err(Error::invalid("initial.mu", "must be finite and ≥ 0"));
        }
        let psi0 = field_from(&grid, &cfg.psi_modes, "initial.psi_modes")?;
        let eta = field_from(&grid, &cfg.eta_modes, "initial.eta_modes")?;
        let target = field_from(&grid, &cfg.target_modes, "targets.terminal")?;
        if cfg.lambdas.iter().any(|l| !(*l > 0.0) || !l.is_finite()) || cfg.lambdas.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::invalid("lambda.grid", "must be positive and strictly decreasing"));
        }
        if cfg.history_nodes < 2 {
            return Err(Error::invalid("numerics.history_nodes", "must be at least 2"));
        }
        if !(cfg.picard_tol > 0.0) || cfg.picard_max_iter == 0 {
            return Err(Error::invalid("numerics.picard_tol", "tolerance and sweep limit must be positive"));
        }
        let quad = TimeQuadrature::new(cfg.panels_per_unit, cfg.gauss_order).map_err(|e| match e {
            Error::Validation { reason, field } if field == "quadrature.order" => {
                Error::invalid("numerics.gauss_order", reason)
            }
            Error::Validation { reason, .. } => Error::invalid("numerics.panels_per_unit", reason),
            other => other,
        })?;
        let time_grid = TimeGrid { steps_per_unit: cfg.steps_per_unit, impulse_samples: cfg.impulse_samples };
        let families = Families::new(params, cfg.modes, cfg.horizon)?;

        let sp0 = lp_norm(&psi0, &space);
        let theta_min = theta_min_for(cfg.weight_rate, cfg.tail_tol, sp0);
        let mu = cfg.psi_rate;
        let history = HistorySegment::from_fn(theta_min, cfg.history_nodes, cfg.weight_rate, cfg.tail_tol, |t| {
            psi0.scale((mu * t).exp())
        })?;
        let system = System::new(space, families, control, schedule, psi0, eta, quad, time_grid)?;

        let targets = if cfg.intermediate_targets.is_empty() {
            alloc::vec![target]
        } else {
            if cfg.intermediate_targets.len() != p {
                return Err(Error::invalid("targets.intermediate", alloc::format!("need {p} intermediate targets")));
            }
            let mut t = cfg
                .intermediate_targets
                .iter()
                .map(|m| field_from(&grid, m, "targets.intermediate"))
                .collect::<Result<Vec<_>>>()?;
            t.push(target);
            t
        };
        let problem = ControlProblem::new(system, delay, history, targets)?;
        for (j, g) in problem.gramians().iter().enumerate() {
            g.check_invariants().map_err(|e| Error::invalid("control", alloc::format!("Gramian {j}: {e}")))?;
        }
        let phase = PhaseConstants::compute(problem.history(), problem.system().space(), cfg.horizon, 64);
        Ok(Self { config: cfg.clone(), problem, phase })
    }

    /// The configuration this was built from.
    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// The assembled problem.
    pub fn problem(&self) -> &ControlProblem {
        &self.problem
    }

    /// The dynamics.
    pub fn system(&self) -> &System {
        self.problem.system()
    }

    /// The `λ` values to sweep.
    pub fn lambdas(&self) -> &[f64] {
        &self.config.lambdas
    }

    /// `true` for `α = 2`, where closed-form classical checks apply.
    pub fn classical_mode(&self) -> bool {
        self.system().families().params().is_classical()
    }

    /// The Picard stopping rule.
    pub fn picard_options(&self) -> PicardOptions {
        PicardOptions { tol: self.config.picard_tol, max_iter: self.config.picard_max_iter }
    }

    /// The phase-space constants `K₁`, `K₂`.
    pub fn phase_constants(&self) -> &PhaseConstants {
        &self.phase
    }

    /// Inputs of the contraction condition at `λ`, with `M = 1`,
    /// `M̃ = ‖B‖`, `δ = 0` and `ζ = L`.
    pub fn cnd_inputs(&self, lambda: f64) -> CndInputs {
        let sys = self.system();
        CndInputs {
            m: 1.0,
            m_tilde: sys.control().mtilde(),
            horizon: sys.horizon(),
            gamma: sys.families().gamma(),
            delta: 0.0,
            k2: self.phase.k2,
            zeta: self.problem.delay().certificate(),
            impulses: sys.schedule().count(),
            lambda,
        }
    }

    /// Left-hand side of the contraction condition at `λ`.
    ///
    /// # Errors
    ///
    /// See [`cnd_check`].
    pub fn cnd(&self, lambda: f64) -> Result<f64> {
        cnd_check(&self.cnd_inputs(lambda))
    }

    /// `(N_j, C_j)` on the ball of radius `r`; the nonlinearity is bounded by
    /// `L·r'` with `r' = K₁‖ψ‖_B + K₂ r`.
    ///
    /// # Errors
    ///
    /// See [`bounds_nj_cj`].
    pub fn bounds(&self, r: f64, lambda: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let sys = self.system();
        let sp = sys.space();
        let sched = sys.schedule();
        let r_prime = self.phase.k1 * phase_norm(self.problem.history(), sp) + self.phase.k2 * r;
        bounds_nj_cj(&BoundsInputs {
            cnd: self.cnd_inputs(lambda),
            xi_norms: self.problem.targets().iter().map(|x| lp_norm(x, sp)).collect(),
            psi0_norm: lp_norm(sys.initial(), sp),
            eta_norm: lp_norm(sys.velocity(), sp),
            phi_norm: self.problem.delay().certificate() * r_prime,
            kappa: (1..=sched.count()).map(|j| sched.kappa(j, sp)).collect(),
            theta: (1..=sched.count()).map(|j| sched.theta(j, sp)).collect(),
        })
    }

    /// Readings of the standing assumptions.
    pub fn assumptions(&self) -> AssumptionReport {
        let sys = self.system();
        let sched = sys.schedule();
        AssumptionReport {
            min_gramian_diagonal: self
                .problem
                .gramians()
                .iter()
                .map(|g| g.min_diagonal())
                .fold(f64::INFINITY, f64::min),
            memory_bound: self.problem.delay().certificate(),
            kappa: (1..=sched.count()).map(|j| sched.kappa(j, sys.space())).collect(),
            theta: (1..=sched.count()).map(|j| sched.theta(j, sys.space())).collect(),
        }
    }

    /// A one-line human summary.
    pub fn describe(&self) -> String {
        let sys = self.system();
        alloc::format!(
            "γ = {}, N = {}, p = {}, T = {}, impulses = {}, L = {:e}",
            sys.families().gamma(),
            sys.modes(),
            sys.space().p(),
            sys.horizon(),
            sys.schedule().count(),
            self.problem.delay().certificate()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_build() {
        let cfg = ScenarioConfig { modes: 8, ..ScenarioConfig::default() };
        let s = Scenario::build(&cfg).unwrap();
        assert_eq!(s.system().modes(), 8);
        assert_eq!(s.system().families().gamma(), 0.75);
        assert!(!s.classical_mode());
        assert!(s.assumptions().min_gramian_diagonal > 0.0);
    }

    #[test]
    fn classical_flag_and_key_errors() {
        let s = Scenario::build(&ScenarioConfig { modes: 4, alpha: 2.0, ..ScenarioConfig::default() }).unwrap();
        assert!(s.classical_mode());
        let bad = ScenarioConfig { modes: 4, breakpoints: alloc::vec![0.6, 0.5], ..ScenarioConfig::default() };
        assert!(alloc::format!("{}", Scenario::build(&bad).unwrap_err()).contains("schedule.breakpoints"));
        let bad = ScenarioConfig { modes: 2, target_modes: alloc::vec![1.0; 3], ..ScenarioConfig::default() };
        assert!(alloc::format!("{}", Scenario::build(&bad).unwrap_err()).contains("targets.terminal"));
        let bad = ScenarioConfig { modes: 2, lambdas: alloc::vec![1e-3, 1e-2], ..ScenarioConfig::default() };
        assert!(alloc::format!("{}", Scenario::build(&bad).unwrap_err()).contains("lambda.grid"));
    }
}
