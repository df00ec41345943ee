//! Kernel classifiers built on the encoded dataset states.
//!
//! Every flavor estimates the same decision function
//! `f(x̃) = Σ_m (-1)^{y_m} w_m k(x_m, x̃)` with `k = Re⟨x_m|x̃⟩` for the
//! Hadamard-test flavors and `k = |⟨x_m|x̃⟩|²` for the swap-test flavors.
//! The simplified flavors expose it as `⟨Z⟩` of the ancilla alone; the legacy
//! flavors need the two-qubit parity `⟨Z_anc Z_class⟩`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::amplitude_estimation::{StatePrepOracle, Target};
use crate::encoding::{
    encoding_unitary, legacy_preparation, normalized_amplitudes, sqkc_preparation, EncodedDataset,
    Flavor, LabeledDataset, LegacyFlavor, SqkcFlavor,
};
use crate::error::{QkcError, Result};
use crate::scalar::{real, Real};
use crate::sim::{GateSpec, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// `Re⟨x|x̃⟩`
    ReOverlap,
    /// `|⟨x|x̃⟩|²`
    Fidelity,
}

impl Flavor {
    pub fn kernel(self) -> Kernel {
        if self.is_hadamard() {
            Kernel::ReOverlap
        } else {
            Kernel::Fidelity
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierOutcome<T: Real> {
    pub flavor: Flavor,
    pub score: T,
    pub pr_one: T,
    pub predicted_label: u8,
    pub expectation: T,
}

/// Sign rule with ties going to class 0.
pub fn decide<T: Real>(score: T) -> u8 {
    if score >= T::zero() {
        0
    } else {
        1
    }
}

/// Full classifier circuit and the qubits whose parity is read out.
#[derive(Clone, Debug)]
pub struct ClassifierCircuit<T: Real> {
    pub flavor: Flavor,
    pub gates: Vec<GateSpec<T>>,
    pub n_qubits: usize,
    /// `[ancilla]` for SHC/SSC, `[ancilla, class]` for HC/SC.
    pub readout: Vec<usize>,
}

fn swap_test_gates<T: Real>(ancilla: usize, a: &[usize], b: &[usize]) -> Vec<GateSpec<T>> {
    a.iter()
        .zip(b)
        .map(|(&p, &q)| GateSpec::swap(p, q).controlled(ancilla))
        .collect()
}

pub fn sqkc_circuit<T: Real>(
    data: &EncodedDataset<T>,
    flavor: SqkcFlavor,
) -> Result<(ClassifierCircuit<T>, usize)> {
    let (layout, mut gates) = sqkc_preparation(data, flavor)?;
    let anc = layout.ancilla;
    match flavor {
        SqkcFlavor::Shc => gates.push(GateSpec::h(anc)),
        SqkcFlavor::Ssc => {
            gates.push(GateSpec::h(anc));
            gates.extend(swap_test_gates(anc, &layout.data, &layout.test));
            gates.push(GateSpec::h(anc));
        }
    }
    // fold the label into the ancilla so a single qubit carries the sign
    gates.push(GateSpec::cnot(layout.class_qubit(), anc));
    Ok((
        ClassifierCircuit {
            flavor: flavor.into(),
            gates,
            n_qubits: layout.n_qubits,
            readout: vec![anc],
        },
        layout.class_qubit(),
    ))
}

pub fn legacy_circuit<T: Real>(
    data: &LabeledDataset<T>,
    flavor: LegacyFlavor,
) -> Result<ClassifierCircuit<T>> {
    let (layout, mut gates) = legacy_preparation(data, flavor)?;
    let anc = layout.ancilla;
    match flavor {
        LegacyFlavor::Hc => gates.push(GateSpec::h(anc)),
        LegacyFlavor::Sc => {
            gates.push(GateSpec::h(anc));
            gates.extend(swap_test_gates(anc, &layout.data, &layout.test));
            gates.push(GateSpec::h(anc));
        }
    }
    Ok(ClassifierCircuit {
        flavor: flavor.into(),
        gates,
        n_qubits: layout.n_qubits,
        readout: vec![anc, layout.class_qubit],
    })
}

pub fn classifier_circuit<T: Real>(
    data: &LabeledDataset<T>,
    flavor: Flavor,
) -> Result<ClassifierCircuit<T>> {
    match flavor {
        Flavor::Shc => Ok(sqkc_circuit(&EncodedDataset::new(data), SqkcFlavor::Shc)?.0),
        Flavor::Ssc => Ok(sqkc_circuit(&EncodedDataset::new(data), SqkcFlavor::Ssc)?.0),
        Flavor::Hc => legacy_circuit(data, LegacyFlavor::Hc),
        Flavor::Sc => legacy_circuit(data, LegacyFlavor::Sc),
    }
}

/// Exact classification from the simulated final state.
pub fn classify<T: Real>(data: &LabeledDataset<T>, flavor: Flavor) -> Result<ClassifierOutcome<T>> {
    let circuit = classifier_circuit(data, flavor)?;
    let mut state = StateVector::new(circuit.n_qubits)?;
    state.apply_all(&circuit.gates)?;
    let marginal = state.marginal(&circuit.readout)?;
    let pr_one: T = marginal
        .iter()
        .enumerate()
        .filter(|(v, _)| v.count_ones() % 2 == 1)
        .map(|(_, p)| *p)
        .sum();
    let expectation = state.expectation_z(&circuit.readout)?;
    Ok(ClassifierOutcome {
        flavor,
        score: expectation,
        pr_one: pr_one.max(T::zero()).min(T::one()),
        predicted_label: decide(expectation),
        expectation,
    })
}

fn overlap<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Result<Complex<T>> {
    let a = normalized_amplitudes(a)?;
    let b = normalized_amplitudes(b)?;
    if a.len() != b.len() {
        return Err(QkcError::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.iter()
        .zip(&b)
        .fold(real(T::zero()), |acc, (x, y)| acc + x.conj() * y))
}

pub fn kernel_value<T: Real>(x: &[Complex<T>], x_test: &[Complex<T>], kernel: Kernel) -> Result<T> {
    let o = overlap(x, x_test)?;
    Ok(match kernel {
        Kernel::ReOverlap => o.re,
        Kernel::Fidelity => o.norm_sqr(),
    })
}

/// Decision function evaluated with plain inner products.
pub fn classical_score<T: Real>(data: &LabeledDataset<T>, kernel: Kernel) -> Result<T> {
    let mut score = T::zero();
    for ((x, &y), &w) in data
        .train_features()
        .iter()
        .zip(data.labels())
        .zip(data.weights())
    {
        let k = kernel_value(x, data.test_features(), kernel)?;
        score += if y == 0 { w * k } else { -w * k };
    }
    Ok(score)
}

/// Ancilla rotation whose sine carries a signed sample weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightAngle<T: Real> {
    lambda: T,
}

impl<T: Real> WeightAngle<T> {
    pub fn new(lambda: T) -> Self {
        Self { lambda }
    }

    /// `sin λ = (-1)^y w`.
    pub fn from_label_weight(label: u8, weight: T) -> Result<Self> {
        if !(T::zero()..=T::one()).contains(&weight) || label > 1 {
            return Err(QkcError::InvalidConfig(format!(
                "weight {weight} with label {label} has no angle"
            )));
        }
        let s = if label == 0 { weight } else { -weight };
        Ok(Self { lambda: s.asin() })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn sin(&self) -> T {
        self.lambda.sin()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Hadamard,
    Swap,
}

impl TestKind {
    pub fn kernel(self) -> Kernel {
        match self {
            TestKind::Hadamard => Kernel::ReOverlap,
            TestKind::Swap => Kernel::Fidelity,
        }
    }
}

/// Single-sample interference test returning `sin λ · k(x_m, x̃)`.
///
/// `RY(λ)` on the ancilla replaces the opening Hadamard, which scales the
/// interference term by `2 cos(λ/2) sin(λ/2) = sin λ`.
pub fn weighted_test<T: Real>(
    x_m: &[T],
    x_test: &[T],
    angle: WeightAngle<T>,
    kind: TestKind,
) -> Result<T> {
    let lift = |v: &[T]| v.iter().map(|&x| real(x)).collect::<Vec<_>>();
    weighted_test_complex(&lift(x_m), &lift(x_test), angle, kind)
}

pub fn weighted_test_complex<T: Real>(
    x_m: &[Complex<T>],
    x_test: &[Complex<T>],
    angle: WeightAngle<T>,
    kind: TestKind,
) -> Result<T> {
    if x_m.len() != x_test.len() {
        return Err(QkcError::DimensionMismatch {
            expected: x_test.len(),
            found: x_m.len(),
        });
    }
    let u_train = encoding_unitary(x_m)?;
    let u_test = encoding_unitary(x_test)?;
    let d = u_train.dim().trailing_zeros() as usize;
    let data: Vec<usize> = (1..1 + d).collect();
    let mut gates = vec![GateSpec::ry(0, angle.lambda())];
    let n_qubits = match kind {
        TestKind::Hadamard => {
            gates.push(GateSpec::unitary(u_train, data.clone())?.anti_controlled(0));
            gates.push(GateSpec::unitary(u_test, data)?.controlled(0));
            1 + d
        }
        TestKind::Swap => {
            let test: Vec<usize> = (1 + d..1 + 2 * d).collect();
            gates.push(GateSpec::unitary(u_train, data.clone())?);
            gates.push(GateSpec::unitary(u_test, test.clone())?);
            gates.extend(swap_test_gates(0, &data, &test));
            1 + 2 * d
        }
    };
    gates.push(GateSpec::h(0));
    let mut state = StateVector::new(n_qubits)?;
    state.apply_all(&gates)?;
    state.expectation_z(&[0])
}

/// One weighted test per training sample, without any index superposition.
pub fn weighted_terms<T: Real>(data: &LabeledDataset<T>, kind: TestKind) -> Result<Vec<T>> {
    data.train_features()
        .iter()
        .zip(data.labels())
        .zip(data.weights())
        .map(|((x, &y), &w)| {
            let angle = WeightAngle::from_label_weight(y, w)?;
            weighted_test_complex(x, data.test_features(), angle, kind)
        })
        .collect()
}

pub fn aggregate_score<T: Real>(terms: &[T]) -> Result<T> {
    if terms.is_empty() {
        return Err(QkcError::Empty("weighted test terms"));
    }
    Ok(terms.iter().copied().sum())
}

/// State preparation for amplitude estimation of a simplified classifier.
///
/// Applying the returned circuit to `|0…0⟩` leaves the ancilla in `|1⟩`
/// with probability `pr_one`; `target` chooses which outcome is "good".
pub fn sqkc_oracle<T: Real>(
    data: &LabeledDataset<T>,
    flavor: SqkcFlavor,
    target: Target,
) -> Result<StatePrepOracle<T>> {
    let (circuit, _) = sqkc_circuit(&EncodedDataset::new(data), flavor)?;
    StatePrepOracle::new(circuit.gates, circuit.n_qubits, circuit.readout[0], target)
}
