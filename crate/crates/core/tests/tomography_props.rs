use proptest::prelude::*;
use qlink::tomography::{
    correct_populations, fit_pauli_expectations, linear_estimate, mle_reconstruct, random_state, run_tomography,
    tomography_settings, MleOptions, ReadoutModel, TomographySetting,
};
use qlink::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn exact_settings(rho: &qlink::quantum::DensityMatrix) -> Vec<TomographySetting> {
    tomography_settings()
        .into_iter()
        .map(|mut s| {
            s.populations = Some(s.probabilities(rho.matrix()));
            s
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linear_inversion_recovers_exact_state(seed in any::<u64>(), rank in 1usize..5) {
        let rho = random_state(&mut ChaCha8Rng::seed_from_u64(seed), rank);
        let pauli = fit_pauli_expectations(&exact_settings(&rho)).unwrap();
        let est = linear_estimate(&pauli);
        prop_assert!((est - rho.matrix()).norm() < 1e-9);
    }

    #[test]
    fn mle_is_physical_for_any_populations(raw in prop::collection::vec(prop::array::uniform4(-0.3f64..1.3), 17)) {
        let settings: Vec<TomographySetting> = tomography_settings()
            .into_iter()
            .zip(raw)
            .map(|(mut s, p)| {
                s.populations = Some(p);
                s
            })
            .collect();
        let rho = match mle_reconstruct(&settings, &MleOptions::default()) {
            Ok(rho) => rho,
            Err(Error::NotConverged { best, .. }) => *best,
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        };
        prop_assert!((rho.trace() - 1.0).abs() < 1e-9);
        prop_assert!(rho.min_eigenvalue() >= -1e-9);
        prop_assert!((rho.matrix() - rho.matrix().adjoint()).norm() < 1e-9);
    }

    #[test]
    fn corrected_populations_sum_to_one(counts in prop::array::uniform4(0u64..5000), error in 0.001f64..0.2) {
        prop_assume!(counts.iter().sum::<u64>() > 0);
        let model = ReadoutModel::with_error_rate(error, 1000);
        let p = correct_populations(&counts, &model.confusion()).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn tomography_round_trip_on_random_states() {
    let model = ReadoutModel::with_error_rate(0.05, 10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut distances: Vec<f64> = (0..50)
        .map(|k| {
            let rank = 1 + k % 4;
            let truth = random_state(&mut rng, rank);
            let res = run_tomography(&truth, &model, 100 + k as u64).unwrap();
            assert!(res.mle.min_eigenvalue() >= -1e-9);
            res.mle.trace_distance(&truth).unwrap()
        })
        .collect();
    distances.sort_by(f64::total_cmp);
    let median = distances[25];
    assert!(median < 0.03, "median trace distance {median}");
}

#[test]
fn tomography_is_seed_deterministic() {
    let model = ReadoutModel::with_error_rate(0.05, 2000);
    let truth = random_state(&mut ChaCha8Rng::seed_from_u64(3), 2);
    let a = run_tomography(&truth, &model, 11).unwrap();
    let b = run_tomography(&truth, &model, 11).unwrap();
    assert_eq!(a.pauli, b.pauli);
    assert_eq!(a.mle.matrix(), b.mle.matrix());
}
