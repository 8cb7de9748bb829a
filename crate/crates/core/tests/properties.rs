//! Structural invariants checked on randomized inputs.

use std::sync::{Arc, OnceLock};

use fracctl_core::banach::{
    dual_norm, duality_map, duality_map_inverse, lemma21_check, lp_norm, pairing, phase_norm, HistorySegment,
    LebesgueSpace, PhaseConstants,
};
use fracctl_core::evolution::{
    delay_functional_f, discrete_gronwall_bound, impulse_h, DelayBeta, DelayLaw, ImpulseKernel, ImpulseSchedule,
    MemoryKernel, PieceKind, Trajectory, TrajectoryPiece,
};
use fracctl_core::gramian::{assemble_gramian, solve_resolvent_eq, GramianOperator, TimeQuadrature};
use fracctl_core::spectral::{ControlOperatorSpec, Families, FractionalParams, SpatialGrid, SpectralField};
use proptest::prelude::*;

const MODES: usize = 6;

fn grid() -> Arc<SpatialGrid> {
    static G: OnceLock<Arc<SpatialGrid>> = OnceLock::new();
    G.get_or_init(|| Arc::new(SpatialGrid::with_modes(MODES).unwrap())).clone()
}

fn space(p: f64) -> LebesgueSpace {
    LebesgueSpace::new(p, grid()).unwrap()
}

fn field(c: &[f64]) -> SpectralField {
    SpectralField::from_coeffs(&grid(), c.to_vec()).unwrap()
}

fn gramian() -> &'static GramianOperator {
    static G: OnceLock<GramianOperator> = OnceLock::new();
    G.get_or_init(|| {
        let g = grid();
        let fam = Families::new(FractionalParams::new(1.5).unwrap(), MODES, 1.0).unwrap();
        assemble_gramian(0.0, 1.0, &ControlOperatorSpec::identity(&g), &fam, &TimeQuadrature::default(), &g).unwrap()
    })
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, MODES).prop_filter("nonzero", |c| c.iter().any(|v| v.abs() > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn duality_map_identities(c in coeffs(), p in 2.0..6.0f64) {
        let sp = space(p);
        let x = field(&c);
        let n = lp_norm(&x, &sp);
        let j = duality_map(&x, &sp);
        prop_assert!((pairing(&x, &j) - n * n).abs() <= 1e-10 * n * n);
        prop_assert!((dual_norm(&j, &sp) - n).abs() <= 1e-10 * n);
        let back = duality_map_inverse(&j, &sp);
        for (a, b) in back.values().iter().zip(x.values()) {
            prop_assert!((a - b).abs() <= 1e-9 * n);
        }
    }

    #[test]
    fn norm_is_homogeneous_and_subadditive(a in coeffs(), b in coeffs(), s in -5.0..5.0f64, p in 2.0..8.0f64) {
        let sp = space(p);
        let (x, y) = (field(&a), field(&b));
        let nx = lp_norm(&x, &sp);
        prop_assert!((lp_norm(&x.scale(s), &sp) - s.abs() * nx).abs() <= 1e-12 * nx.max(1.0) * s.abs().max(1.0));
        prop_assert!(lp_norm(&x.add(&y), &sp) <= (nx + lp_norm(&y, &sp)) * (1.0 + 1e-12));
    }

    #[test]
    fn norms_increase_with_p_on_normalized_measure(c in coeffs(), p in 2.0..5.0f64, dp in 0.1..3.0f64) {
        // ‖x‖_p / π^{1/p} is the norm for the probability measure dξ/π
        let pi = std::f64::consts::PI;
        let x = field(&c);
        let lo = lp_norm(&x, &space(p)) / pi.powf(1.0 / p);
        let hi = lp_norm(&x, &space(p + dp)) / pi.powf(1.0 / (p + dp));
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn gramian_form_is_nonnegative(c in coeffs()) {
        let g = gramian();
        prop_assert!(g.matrix_form(&field(&c)) >= -1e-14);
    }

    #[test]
    fn hilbert_resolvent_is_a_contraction(c in coeffs(), e in -6.0..0.0f64) {
        let lambda = 10f64.powf(e);
        let sp = space(2.0);
        let h = field(&c);
        let sol = solve_resolvent_eq(lambda, &h, gramian(), &sp).unwrap();
        let nh = lp_norm(&h, &sp);
        prop_assert!(lp_norm(&sol.z, &sp) <= nh * (1.0 + 1e-9));
        prop_assert!(sol.residual <= 1e-8 * lambda * nh);
    }

    #[test]
    fn gronwall_bound_dominates_equality_case(
        pairs in prop::collection::vec((0.0..3.0f64, 0.0..1.5f64), 1..12)
    ) {
        let (g, w): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let mut f = Vec::with_capacity(g.len());
        for n in 0..g.len() {
            let v = g[n] + (0..n).map(|k| w[k] * f[k]).sum::<f64>();
            f.push(v);
        }
        let b = discrete_gronwall_bound(&g, &w).unwrap();
        for (fi, bi) in f.iter().zip(&b) {
            prop_assert!(*fi <= bi * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn impulse_stays_within_kappa(
        c in coeffs(),
        frac in 0.01..1.0f64,
        amp in -1.0..1.0f64,
        rate in 0.0..2.0f64,
        k in 1usize..=MODES,
        l in 0.0..3.0f64,
    ) {
        let sp = space(3.0);
        let kernel = ImpulseKernel::Trig { amplitude: amp, rate, wavenumber: k, z_frequency: l };
        let sched = ImpulseSchedule::new(vec![0.4, 0.6], 1.0, vec![kernel], MODES).unwrap();
        let t = 0.4 + 0.2 * frac;
        let h = impulse_h(1, t, &field(&c), &sched).unwrap();
        prop_assert!(lp_norm(&h, &sp) <= sched.kappa(1, &sp) * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn memory_forcing_is_bounded_by_phase_norm(
        c in coeffs(),
        mu in 0.0..2.0f64,
        scale in 1e-3..1.0f64,
        rate in 0.5..3.0f64,
        beta in 0.0..1.0f64,
    ) {
        let sp = space(2.0);
        let x = field(&c);
        let hist = HistorySegment::from_fn(-40.0, 801, -0.5, 1e-10, |t| x.scale((mu * t).exp())).unwrap();
        let law = DelayLaw::new(MemoryKernel::Exponential { scale, rate }, DelayBeta::Constant(beta), -0.5).unwrap();
        let f = delay_functional_f(&hist, &law);
        prop_assert!(lp_norm(&f, &sp) <= law.certificate() * phase_norm(&hist, &sp) * (1.0 + 1e-6));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quartic_resolvent_is_a_contraction(c in coeffs(), e in -4.0..0.0f64) {
        let lambda = 10f64.powf(e);
        let sp = space(4.0);
        let h = field(&c);
        let sol = solve_resolvent_eq(lambda, &h, gramian(), &sp).unwrap();
        let nh = lp_norm(&h, &sp);
        prop_assert!(lp_norm(&sol.z, &sp) <= nh * (1.0 + 1e-9));
        prop_assert!(sol.residual <= 1e-8 * lambda * nh);
    }

    #[test]
    fn phase_segments_obey_the_history_estimate(
        c in coeffs(),
        d in coeffs(),
        mu in 0.0..1.0f64,
        s in -5.0..1.0f64,
    ) {
        let sp = space(2.0);
        let x0 = field(&c);
        let jump = field(&d);
        let hist = HistorySegment::from_fn(-45.0, 401, -0.5, 1e-10, |t| x0.scale((mu * t).exp())).unwrap();
        let t0: Vec<f64> = (0..=20).map(|k| 0.5 * k as f64 / 20.0).collect();
        let t1: Vec<f64> = (0..=20).map(|k| 0.5 + 0.5 * k as f64 / 20.0).collect();
        let traj = Trajectory::new(vec![
            TrajectoryPiece {
                kind: PieceKind::Active,
                index: 0,
                states: t0.iter().map(|&t| x0.scale((3.0 * t).cos())).collect(),
                times: t0,
            },
            TrajectoryPiece {
                kind: PieceKind::Impulse,
                index: 1,
                states: t1.iter().map(|&t| jump.scale(1.0 + t)).collect(),
                times: t1,
            },
        ])
        .unwrap();
        let consts = PhaseConstants::compute(&hist, &sp, 1.0, 32);
        prop_assert!(lemma21_check(&traj, &hist, s, &consts, &sp).unwrap());
    }
}

#[test]
fn gramian_spectrum_is_nonnegative() {
    let eig = gramian().eigenvalues();
    let top = eig.iter().cloned().fold(0.0, f64::max);
    assert!(eig.iter().all(|&e| e >= -1e-13 * top), "{eig:?}");
}
