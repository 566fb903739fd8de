use proptest::prelude::*;
use proxauth_core::ml::{split, train, Algo, Hyperparams};
use proxauth_core::rfsim::{build_environment, generate_dataset, SimConfig};
use proxauth_core::seed::derive_seed;
use proxauth_core::threat::{evasion_perturb, interference_perturb, run_evasion, rssi_uniform_shift};
use proxauth_core::{LabeledSet, RSSI_FEATURE};

fn rows() -> impl Strategy<Value = LabeledSet> {
    prop::collection::vec((prop::collection::vec(-100.0f64..10.0, 5), 0u8..2), 1..60)
        .prop_map(|raw| {
            let (rows, labels) = raw.into_iter().unzip();
            LabeledSet::new(rows, labels).unwrap()
        })
}

proptest! {
    #[test]
    fn evasion_touches_only_rssi(data in rows(), sigma in 0.0f64..5.0, seed: u64) {
        let noisy = evasion_perturb(&data, sigma, seed).unwrap();
        prop_assert_eq!(&noisy.labels, &data.labels);
        for (a, b) in data.rows.iter().zip(&noisy.rows) {
            for j in (0..5).filter(|&j| j != RSSI_FEATURE) {
                prop_assert_eq!(a[j], b[j]);
            }
        }
        prop_assert_eq!(&noisy, &evasion_perturb(&data, sigma, seed).unwrap());
    }

    #[test]
    fn uniform_shift_stays_in_range(data in rows(), range in 0.0f64..5.0, seed: u64) {
        let shifted = rssi_uniform_shift(&data, range, seed).unwrap();
        prop_assert_eq!(&shifted.labels, &data.labels);
        for (a, b) in data.rows.iter().zip(&shifted.rows) {
            prop_assert!((a[RSSI_FEATURE] - b[RSSI_FEATURE]).abs() <= range + 1e-12);
            for j in (0..5).filter(|&j| j != RSSI_FEATURE) {
                prop_assert_eq!(a[j], b[j]);
            }
        }
    }

    #[test]
    fn interference_keeps_labels_and_is_seeded(data in rows(), sigma in 0.0f64..5.0, seed: u64) {
        let noisy = interference_perturb(&data, sigma, seed).unwrap();
        prop_assert_eq!(&noisy.labels, &data.labels);
        prop_assert_eq!(&noisy, &interference_perturb(&data, sigma, seed).unwrap());
        prop_assert_eq!(&interference_perturb(&data, 0.0, seed).unwrap(), &data);
    }

    #[test]
    fn negative_or_nan_sigma_is_rejected(data in rows(), sigma in -5.0f64..-1e-9) {
        prop_assert!(evasion_perturb(&data, sigma, 0).is_err());
        prop_assert!(interference_perturb(&data, f64::NAN, 0).is_err());
    }
}

/// Averaged over seeds, more RSSI noise should not help a model.
#[test]
fn evasion_accuracy_does_not_rise_with_sigma() {
    const SLACK: f64 = 0.01;
    let sigmas = [1.0, 2.0, 4.0, 8.0];
    let algos = [Algo::Dt, Algo::Nb, Algo::Lr];
    let mut mean = vec![vec![0.0; sigmas.len() + 1]; algos.len()];
    let seeds = 5u64;
    for seed in 0..seeds {
        let env = build_environment(&SimConfig::default(), seed).unwrap();
        let data = generate_dataset(&env, 600, 600, derive_seed(seed, 1)).unwrap().to_labeled();
        let (tr, te) = split(&data, 0.25, seed).unwrap();
        let models: Vec<_> =
            algos.iter().map(|&a| train(a, &tr, &Hyperparams::default(), derive_seed(seed, 2)).unwrap()).collect();
        let report = run_evasion(&models, &te, &sigmas, derive_seed(seed, 3)).unwrap();
        for (i, m) in models.iter().enumerate() {
            let name = m.algo.name();
            mean[i][0] += report.baseline(name).unwrap().accuracy / seeds as f64;
            for (k, &s) in sigmas.iter().enumerate() {
                mean[i][k + 1] += report.post(name, s).unwrap().accuracy / seeds as f64;
            }
        }
    }
    for (algo, curve) in algos.iter().zip(&mean) {
        for w in curve.windows(2) {
            assert!(w[1] <= w[0] + SLACK, "{algo}: {curve:?}");
        }
    }
}
