use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qkc::amplitude_estimation::Target;
use qkc::classifiers::{
    aggregate_score, classical_score, classify, kernel_value, sqkc_oracle, weighted_terms, Kernel,
    TestKind,
};
use qkc::datasets::builtin;
use qkc::encoding::{Flavor, LabeledDataset, SqkcFlavor};

const FLAVORS: [Flavor; 4] = [Flavor::Hc, Flavor::Sc, Flavor::Shc, Flavor::Ssc];

fn random_dataset(rng: &mut ChaCha8Rng, complex: bool) -> LabeledDataset<f64> {
    let m = rng.random_range(1..=8);
    let n = rng.random_range(1..=4);
    let vector = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        loop {
            let v: Vec<Complex64> = (0..n)
                .map(|_| {
                    let im = if complex {
                        rng.random_range(-1.0..1.0)
                    } else {
                        0.0
                    };
                    Complex64::new(rng.random_range(-1.0..1.0), im)
                })
                .collect();
            if v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3 {
                return v;
            }
        }
    };
    let train: Vec<Vec<Complex64>> = (0..m).map(|_| vector(rng)).collect();
    let test = vector(rng);
    let labels: Vec<u8> = (0..m).map(|_| rng.random_range(0..2)).collect();
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    LabeledDataset::new(train, labels, raw.iter().map(|w| w / total).collect(), test).unwrap()
}

#[test]
fn circuit_matches_classical_kernel_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for i in 0..500 {
        let data = random_dataset(&mut rng, i % 3 == 0);
        for flavor in FLAVORS {
            if data.is_real() || flavor.kernel() == Kernel::Fidelity {
                let out = classify(&data, flavor).unwrap();
                let classical = classical_score(&data, flavor.kernel()).unwrap();
                assert!(
                    (out.score - classical).abs() <= 1e-9,
                    "{flavor} dataset {i}: {} vs {classical}",
                    out.score
                );
            }
        }
    }
}

#[test]
fn oracle_probability_matches_classifier() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let data = random_dataset(&mut rng, false);
        for flavor in [SqkcFlavor::Shc, SqkcFlavor::Ssc] {
            let pr_one = classify(&data, flavor.into()).unwrap().pr_one;
            let one = sqkc_oracle(&data, flavor, Target::ProbOne).unwrap();
            let zero = sqkc_oracle(&data, flavor, Target::ProbZero).unwrap();
            assert!((one.probability().unwrap() - pr_one).abs() <= 1e-10);
            assert!((zero.probability().unwrap() - (1.0 - pr_one)).abs() <= 1e-10);
        }
    }
}

#[test]
fn flipping_labels_negates_score() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let data = random_dataset(&mut rng, false);
        let flipped = data.with_flipped_labels();
        for flavor in FLAVORS {
            let a = classify(&data, flavor).unwrap().score;
            let b = classify(&flipped, flavor).unwrap().score;
            assert!((a + b).abs() <= 1e-10, "{flavor}: {a} vs {b}");
        }
    }
}

#[test]
fn training_order_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let data = random_dataset(&mut rng, false);
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.reverse();
        order.rotate_left(rng.random_range(0..data.len()));
        let shuffled = data.reordered(&order).unwrap();
        for flavor in FLAVORS {
            let a = classify(&data, flavor).unwrap().score;
            let b = classify(&shuffled, flavor).unwrap().score;
            assert!((a - b).abs() <= 1e-12, "{flavor}: {a} vs {b}");
        }
    }
}

#[test]
fn eq16_values() {
    let data = builtin("eq16").unwrap().dataset();
    let shc = classify(&data, Flavor::Shc).unwrap();
    let ssc = classify(&data, Flavor::Ssc).unwrap();
    assert!((shc.pr_one - 0.5952).abs() <= 1e-3);
    assert!((ssc.pr_one - 0.6541).abs() <= 1e-3);
    assert_eq!(shc.predicted_label, 1);
    assert_eq!(ssc.predicted_label, 1);
    let h = aggregate_score(&weighted_terms(&data, TestKind::Hadamard).unwrap()).unwrap();
    assert!((h - shc.score).abs() <= 1e-12);
}

#[test]
fn single_precision_tracks_double() {
    let data = builtin("eq16").unwrap().dataset();
    let train: Vec<Vec<f32>> = data
        .train_features()
        .iter()
        .map(|x| x.iter().map(|z| z.re as f32).collect())
        .collect();
    let test: Vec<f32> = data.test_features().iter().map(|z| z.re as f32).collect();
    let weights: Vec<f32> = data.weights().iter().map(|&w| w as f32).collect();
    let d32 = LabeledDataset::from_real(train, data.labels().to_vec(), weights, test).unwrap();
    for flavor in FLAVORS {
        let a = classify(&data, flavor).unwrap().pr_one;
        let b = classify(&d32, flavor).unwrap().pr_one;
        assert!((a - f64::from(b)).abs() <= 1e-5, "{flavor}");
    }
}

proptest! {
    #[test]
    fn kernels_stay_in_range(
        x in prop::collection::vec(-1.0f64..1.0, 4),
        y in prop::collection::vec(-1.0f64..1.0, 4),
        phase in 0.0f64..6.3,
    ) {
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        prop_assume!(y.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let yc: Vec<Complex64> = y.iter().map(|&v| Complex64::from_polar(v, phase)).collect();
        let re = kernel_value(&xc, &yc, Kernel::ReOverlap).unwrap();
        let fid = kernel_value(&xc, &yc, Kernel::Fidelity).unwrap();
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&re));
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&fid));
        prop_assert!(re * re <= fid + 1e-12);
        let self_fid = kernel_value(&xc, &xc, Kernel::Fidelity).unwrap();
        prop_assert!((self_fid - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn probabilities_are_valid(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_dataset(&mut rng, false);
        for flavor in FLAVORS {
            let out = classify(&data, flavor).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&out.pr_one));
            prop_assert!(out.score.abs() <= 1.0 + 1e-12);
        }
    }
}
