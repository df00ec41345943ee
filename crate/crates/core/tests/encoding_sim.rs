use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use qkc::encoding::{
    amplitude_encode, encoding_unitary, prepare_sqkc_state, EncodedDataset, LabeledDataset,
    SqkcFlavor, SqkcLayout,
};
use qkc::sim::{circuit_unitary, GateSpec, Matrix, StateVector};

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| {
            v.into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect()
        })
        .prop_filter("nonzero", |v: &Vec<Complex64>| {
            v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3
        })
}

fn normalize(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / n).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qft_is_the_dft(v in complex_vec(8)) {
        let v = normalize(&v);
        let mut s = StateVector::from_amplitudes(v.clone()).unwrap();
        s.apply(&GateSpec::qft(vec![0, 1, 2])).unwrap();
        for k in 0..8 {
            let expected: Complex64 = (0..8)
                .map(|j| v[j] * Complex64::from_polar(1.0 / 8f64.sqrt(), 2.0 * PI * (j * k) as f64 / 8.0))
                .sum();
            prop_assert!((s.amplitude(k) - expected).norm() <= 1e-12);
        }
        s.apply(&GateSpec::qft_inverse(vec![0, 1, 2])).unwrap();
        for (a, b) in s.amplitudes().iter().zip(&v) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn gates_preserve_norm(v in complex_vec(16), angle in -3.2f64..3.2) {
        let mut s = StateVector::from_amplitudes(normalize(&v)).unwrap();
        let circuit = [
            GateSpec::h(0),
            GateSpec::ry(1, angle),
            GateSpec::cnot(1, 3),
            GateSpec::phase(2, angle).controlled(0),
            GateSpec::swap(0, 3),
            GateSpec::qft(vec![1, 2, 3]),
        ];
        s.apply_all(&circuit).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn encoding_unitary_prepares_the_state(v in complex_vec(4)) {
        let u = encoding_unitary(&v).unwrap();
        prop_assert!(u.is_unitary(1e-12));
        let target = normalize(&v);
        let col0: Vec<Complex64> = (0..4).map(|r| u.get(r, 0)).collect();
        for (a, b) in col0.iter().zip(&target) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn amplitude_encoding_pads_and_normalizes(x in prop::collection::vec(-1.0f64..1.0, 1..7)) {
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let s = amplitude_encode(&x).unwrap();
        prop_assert!(s.dim().is_power_of_two() && s.dim() >= 2 && s.dim() >= x.len());
        prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-12);
        for i in x.len()..s.dim() {
            prop_assert_eq!(s.amplitude(i), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn index_register_carries_the_weights(
        labels in prop::collection::vec(0u8..2, 1..8),
        seed in 0u64..1000,
    ) {
        let m = labels.len();
        let raw: Vec<f64> = (0..m).map(|i| 0.1 + ((seed + 7 * i as u64) % 13) as f64).collect();
        let total: f64 = raw.iter().sum();
        let train: Vec<Vec<f64>> = (0..m).map(|i| vec![1.0 + i as f64, 0.5, -0.3]).collect();
        let data = LabeledDataset::from_real(
            train,
            labels.clone(),
            raw.iter().map(|w| w / total).collect(),
            vec![0.2, 1.0, 0.4],
        )
        .unwrap();
        let enc = EncodedDataset::new(&data);
        for flavor in [SqkcFlavor::Shc, SqkcFlavor::Ssc] {
            let state = prepare_sqkc_state(&enc, flavor).unwrap();
            let layout = SqkcLayout::new(flavor, enc.index_qubits(), 2);
            prop_assert_eq!(state.n_qubits(), layout.n_qubits);
            let marginal = state.marginal(&layout.index).unwrap();
            for (pos, &slot) in enc.slots().iter().enumerate() {
                let orig = enc.permutation()[pos];
                prop_assert!((marginal[slot] - data.weights()[orig]).abs() <= 1e-12);
            }
            // the class qubit reads 1 exactly on class-1 weight
            let w1: f64 = (0..m).filter(|&i| labels[i] == 1).map(|i| data.weights()[i]).sum();
            let p1 = state.probability(layout.class_qubit(), true).unwrap();
            prop_assert!((p1 - w1).abs() <= 1e-12);
        }
    }
}

#[test]
fn state_preparation_of_basis_vector() {
    let mut target = vec![Complex64::new(0.0, 0.0); 4];
    target[2] = Complex64::new(0.0, 1.0);
    let m = Matrix::state_preparation(&target).unwrap();
    assert!(m.is_unitary(1e-12));
    let out = m.apply_to(&[Complex64::new(1.0, 0.0), 0.0.into(), 0.0.into(), 0.0.into()]);
    assert!((out[2] - target[2]).norm() <= 1e-12);
}

#[test]
fn bell_pair_closed_form() {
    let mut s = StateVector::<f64>::new(2).unwrap();
    s.apply_all(&[GateSpec::h(0), GateSpec::cnot(0, 1)])
        .unwrap();
    let r = 0.5f64.sqrt();
    assert!((s.amplitude(0).re - r).abs() <= 1e-12);
    assert!((s.amplitude(3).re - r).abs() <= 1e-12);
    assert!(s.expectation_z(&[0, 1]).unwrap() > 1.0 - 1e-12);
    assert!(s.expectation_z(&[0]).unwrap().abs() <= 1e-12);
}

#[test]
fn circuit_unitary_of_h_squared_is_identity() {
    let u = circuit_unitary(&[GateSpec::<f64>::h(1), GateSpec::h(1)], 2).unwrap();
    for r in 0..4 {
        for c in 0..4 {
            let expected = if r == c { 1.0 } else { 0.0 };
            assert!((u.get(r, c) - Complex64::new(expected, 0.0)).norm() <= 1e-12);
        }
    }
}

#[test]
fn sampling_matches_distribution() {
    let mut s = StateVector::<f64>::new(1).unwrap();
    s.apply(&GateSpec::ry(0, 2.0 * 0.3f64.sqrt().asin()))
        .unwrap();
    let counts = s.sample(&[0], 20_000, 11).unwrap();
    assert_eq!(counts.total_shots(), 20_000);
    assert!((counts.frequency(1) - 0.3).abs() <= 0.015);
    assert_eq!(counts, s.sample(&[0], 20_000, 11).unwrap());
}
