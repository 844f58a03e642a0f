use nonlinear_metrology::bounds::{extreme_eigenvalues, qcrb_entangled};
use nonlinear_metrology::exact_moments::{moments_exact, sensitivity_exact, Axis};
use nonlinear_metrology::oracle::{collective_moments, evolve, string_extremes};
use nonlinear_metrology::protocol_sim::{
    adaptive_feedback, run_estimation, FeedbackConfig, TrialConfig,
};
use nonlinear_metrology::{
    CoherentPreparation, CouplingSpec, ExperimentClock, SingleBodySpectrum, Spin,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_moments_match_dense_evolution(
        two_j in 1u64..80,
        beta in 0.05f64..3.09,
        phi in -3.1f64..3.1,
    ) {
        let spin = Spin::from_two_j(two_j).unwrap();
        let exact = moments_exact(spin, beta, phi);
        let prep = CoherentPreparation::new(spin, beta).unwrap();
        let dense = collective_moments(&evolve(&prep, phi, 2).unwrap());
        let scale = spin.j().max(1.0).powi(2);
        for ((name, a), (_, b)) in exact.fields().iter().zip(dense.fields().iter()) {
            prop_assert!((a - b).abs() <= 1e-10 * scale, "{name}: {a} vs {b}");
        }
    }

    #[test]
    fn extremes_match_enumeration(
        levels in prop::collection::vec(-2.0f64..2.0, 2..4),
        k in 1u32..5,
        n in 5u64..25,
        self_interactions in any::<bool>(),
    ) {
        let Ok(spectrum) = SingleBodySpectrum::new(&levels) else { return Ok(()) };
        let coupling = CouplingSpec::new(k, n, self_interactions).unwrap();
        let fast = extreme_eigenvalues(&spectrum, &coupling).unwrap();
        let slow = string_extremes(&spectrum, &coupling).unwrap();
        let scale = fast.lambda_cap_max.abs().max(fast.lambda_cap_min.abs()).max(1.0);
        if fast.exact {
            prop_assert!((fast.lambda_cap_max - slow.lambda_cap_max).abs() <= 1e-9 * scale);
            prop_assert!((fast.lambda_cap_min - slow.lambda_cap_min).abs() <= 1e-9 * scale);
        }
        prop_assert!(fast.lambda_cap_max <= slow.lambda_cap_max + 1e-9 * scale);
        prop_assert!(fast.lambda_cap_min >= slow.lambda_cap_min - 1e-9 * scale);
    }
}

#[test]
fn entangled_bound_for_qubit_square() {
    let spectrum = SingleBodySpectrum::qubit();
    let coupling = CouplingSpec::new(2, 1000, true).unwrap();
    let clock = ExperimentClock::new(0.0, 1.0, 1).unwrap();
    let extremes = extreme_eigenvalues(&spectrum, &coupling).unwrap();
    let bound = qcrb_entangled(&extremes, &clock).value().unwrap();
    assert!((bound - 4e-6).abs() < 1e-18);
}

#[test]
fn simulation_is_independent_of_thread_count() {
    let spin = Spin::from_two_j(120).unwrap();
    let config = TrialConfig::new(spin, std::f64::consts::FRAC_PI_4, 1e-3, Axis::Y, 300, 24, 5);
    let in_pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_estimation(&config).unwrap())
    };
    assert_eq!(in_pool(1), in_pool(4));
}

#[test]
fn feedback_is_seed_deterministic() {
    let a = adaptive_feedback(&FeedbackConfig::new(8.0, 100, 8, 0.12, 3)).unwrap();
    let b = adaptive_feedback(&FeedbackConfig::new(8.0, 100, 8, 0.12, 3)).unwrap();
    let c = adaptive_feedback(&FeedbackConfig::new(8.0, 100, 8, 0.12, 4)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.final_estimate, c.final_estimate);
}

#[test]
fn y_sensitivity_at_fringe_center_approaches_bound() {
    for two_j in [400u64, 4000, 40000] {
        let spin = Spin::from_two_j(two_j).unwrap();
        let point = sensitivity_exact(spin, std::f64::consts::FRAC_PI_4, 0.0, Axis::Y);
        let bound = 1.0 / (2f64.sqrt() * spin.j().powf(1.5));
        let ratio = point.delta_phi.value().unwrap() / bound;
        assert!(ratio >= 1.0 && ratio < 1.01, "2J = {two_j}: ratio {ratio}");
    }
}
