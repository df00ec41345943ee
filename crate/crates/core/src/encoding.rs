//! Amplitude encoding and preparation of the superposed dataset states.
//!
//! Register layout of the simplified classifiers (SHC/SSC), lowest qubit
//! first: ancilla, index register, data register, and for SSC a separate
//! test register. The index register is class ordered: class-0 samples sit
//! in the lower half of its basis states and class-1 samples in the upper
//! half, so its most significant qubit equals the training label.
//!
//! The legacy classifiers (HC/SC) use ancilla, data, [test], class qubit,
//! index register, with the class qubit written by multi-controlled NOTs.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{QkcError, Result};
use crate::scalar::{qubits_for, real, Real};
use crate::sim::{GateSpec, Matrix, StateVector};
use crate::tolerance::MAX_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Hc,
    Sc,
    Shc,
    Ssc,
}

/// Simplified classifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SqkcFlavor {
    Shc,
    Ssc,
}

/// Classifiers with an explicit class qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegacyFlavor {
    Hc,
    Sc,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Hc => "HC",
            Flavor::Sc => "SC",
            Flavor::Shc => "SHC",
            Flavor::Ssc => "SSC",
        }
    }

    /// Whether the kernel is built from a Hadamard test (real overlap).
    pub fn is_hadamard(self) -> bool {
        matches!(self, Flavor::Hc | Flavor::Shc)
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Flavor {
    type Err = QkcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hc" => Ok(Flavor::Hc),
            "sc" => Ok(Flavor::Sc),
            "shc" => Ok(Flavor::Shc),
            "ssc" => Ok(Flavor::Ssc),
            other => Err(QkcError::Parse(format!("unknown classifier '{other}'"))),
        }
    }
}

impl From<SqkcFlavor> for Flavor {
    fn from(f: SqkcFlavor) -> Self {
        match f {
            SqkcFlavor::Shc => Flavor::Shc,
            SqkcFlavor::Ssc => Flavor::Ssc,
        }
    }
}

impl From<LegacyFlavor> for Flavor {
    fn from(f: LegacyFlavor) -> Self {
        match f {
            LegacyFlavor::Hc => Flavor::Hc,
            LegacyFlavor::Sc => Flavor::Sc,
        }
    }
}

impl TryFrom<Flavor> for SqkcFlavor {
    type Error = QkcError;

    fn try_from(f: Flavor) -> Result<Self> {
        match f {
            Flavor::Shc => Ok(SqkcFlavor::Shc),
            Flavor::Ssc => Ok(SqkcFlavor::Ssc),
            other => Err(QkcError::InvalidConfig(format!(
                "{other} is not a simplified classifier"
            ))),
        }
    }
}

impl fmt::Display for SqkcFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Flavor::from(*self).fmt(f)
    }
}

/// Training samples, labels, weights and one test vector.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset<T: Real> {
    train: Vec<Vec<Complex<T>>>,
    labels: Vec<u8>,
    weights: Vec<T>,
    test: Vec<Complex<T>>,
}

impl<T: Real> LabeledDataset<T> {
    pub fn new(
        train: Vec<Vec<Complex<T>>>,
        labels: Vec<u8>,
        weights: Vec<T>,
        test: Vec<Complex<T>>,
    ) -> Result<Self> {
        let m = train.len();
        if m == 0 {
            return Err(QkcError::InvalidDataset("no training samples".into()));
        }
        if labels.len() != m || weights.len() != m {
            return Err(QkcError::InvalidDataset(format!(
                "{m} samples but {} labels and {} weights",
                labels.len(),
                weights.len()
            )));
        }
        let n = test.len();
        if n == 0 {
            return Err(QkcError::InvalidDataset("empty feature vectors".into()));
        }
        if let Some(bad) = train.iter().position(|x| x.len() != n) {
            return Err(QkcError::InvalidDataset(format!(
                "sample {bad} has {} features, test vector has {n}",
                train[bad].len()
            )));
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(QkcError::InvalidDataset("labels must be 0 or 1".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) {
            return Err(QkcError::InvalidDataset(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::exact_tol() {
            return Err(QkcError::InvalidDataset(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            train,
            labels,
            weights,
            test,
        })
    }

    pub fn from_real(
        train: Vec<Vec<T>>,
        labels: Vec<u8>,
        weights: Vec<T>,
        test: Vec<T>,
    ) -> Result<Self> {
        let lift = |v: Vec<T>| v.into_iter().map(real).collect::<Vec<_>>();
        Self::new(
            train.into_iter().map(lift).collect(),
            labels,
            weights,
            lift(test),
        )
    }

    /// Real dataset with weights `1/M`.
    pub fn uniform(train: Vec<Vec<T>>, labels: Vec<u8>, test: Vec<T>) -> Result<Self> {
        let m = train.len().max(1);
        let w = T::one() / T::lit(m as f64);
        Self::from_real(train, labels, vec![w; m], test)
    }

    /// Number of training samples, M.
    pub fn len(&self) -> usize {
        self.train.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train.is_empty()
    }

    /// Feature dimension, N.
    pub fn dim(&self) -> usize {
        self.test.len()
    }

    pub fn train_features(&self) -> &[Vec<Complex<T>>] {
        &self.train
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn test_features(&self) -> &[Complex<T>] {
        &self.test
    }

    pub fn is_real(&self) -> bool {
        self.train
            .iter()
            .flatten()
            .chain(&self.test)
            .all(|z| z.im == T::zero())
    }

    pub fn with_flipped_labels(&self) -> Self {
        let mut out = self.clone();
        for y in &mut out.labels {
            *y ^= 1;
        }
        out
    }

    /// Reorders samples so that new position `i` holds old sample `order[i]`.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        if !is_permutation(order, self.len()) {
            return Err(QkcError::InvalidConfig("not a permutation".into()));
        }
        Ok(Self {
            train: order.iter().map(|&i| self.train[i].clone()).collect(),
            labels: order.iter().map(|&i| self.labels[i]).collect(),
            weights: order.iter().map(|&i| self.weights[i]).collect(),
            test: self.test.clone(),
        })
    }
}

fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

/// Class-ordered view of a dataset, ready for index-register encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedDataset<T: Real> {
    class_ordered: LabeledDataset<T>,
    index_qubits: usize,
    permutation: Vec<usize>,
    slots: Vec<usize>,
}

impl<T: Real> EncodedDataset<T> {
    pub fn new(data: &LabeledDataset<T>) -> Self {
        let mut permutation: Vec<usize> = (0..data.len()).collect();
        permutation.sort_by_key(|&i| data.labels[i]);
        let class_ordered = data.reordered(&permutation).expect("sorted indices");
        let m0 = class_ordered.labels.iter().filter(|&&y| y == 0).count();
        let m1 = class_ordered.len() - m0;
        // one qubit for the class, the rest addresses the larger class
        let per_class = m0.max(m1);
        let index_qubits = 1 + if per_class <= 1 {
            0
        } else {
            qubits_for(per_class)
        };
        let half = 1usize << (index_qubits - 1);
        let slots = (0..class_ordered.len())
            .map(|i| if i < m0 { i } else { half + (i - m0) })
            .collect();
        Self {
            class_ordered,
            index_qubits,
            permutation,
            slots,
        }
    }

    pub fn class_ordered(&self) -> &LabeledDataset<T> {
        &self.class_ordered
    }

    pub fn index_qubits(&self) -> usize {
        self.index_qubits
    }

    /// Ordered position → original sample index.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Ordered position → index-register basis state.
    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    /// `Σ_m √w_m |m⟩` over the index register.
    pub fn index_amplitudes(&self) -> Vec<Complex<T>> {
        let mut amps = vec![real(T::zero()); 1 << self.index_qubits];
        for (slot, w) in self.slots.iter().zip(&self.class_ordered.weights) {
            amps[*slot] = real(w.sqrt());
        }
        amps
    }
}

/// L2-normalized features zero-padded to a power of two (at least 2).
pub fn normalized_amplitudes<T: Real>(features: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if features.is_empty() {
        return Err(QkcError::Empty("feature vector"));
    }
    let qubits = qubits_for(features.len());
    if qubits > MAX_QUBITS {
        return Err(QkcError::Capacity {
            requested: qubits,
            limit: MAX_QUBITS,
        });
    }
    let norm = features.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if norm.is_nan() || norm <= T::zero() || !norm.is_finite() {
        return Err(QkcError::ZeroVector);
    }
    let mut out: Vec<Complex<T>> = features.iter().map(|z| z / real(norm)).collect();
    out.resize(1 << qubits, real(T::zero()));
    Ok(out)
}

pub fn amplitude_encode<T: Real>(features: &[T]) -> Result<StateVector<T>> {
    let lifted: Vec<Complex<T>> = features.iter().map(|&x| real(x)).collect();
    amplitude_encode_complex(&lifted)
}

pub fn amplitude_encode_complex<T: Real>(features: &[Complex<T>]) -> Result<StateVector<T>> {
    StateVector::from_amplitudes(normalized_amplitudes(features)?)
}

/// Unitary `U` with `U|0⟩ = |x⟩`.
pub fn encoding_unitary<T: Real>(features: &[Complex<T>]) -> Result<Matrix<T>> {
    Matrix::state_preparation(&normalized_amplitudes(features)?)
}

fn register(start: usize, width: usize) -> Vec<usize> {
    (start..start + width).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqkcLayout {
    pub flavor: SqkcFlavor,
    pub ancilla: usize,
    pub index: Vec<usize>,
    pub data: Vec<usize>,
    /// Test register; empty for SHC where training and test share `data`.
    pub test: Vec<usize>,
    pub n_qubits: usize,
}

impl SqkcLayout {
    pub fn new(flavor: SqkcFlavor, index_qubits: usize, data_qubits: usize) -> Self {
        let index = register(1, index_qubits);
        let data = register(1 + index_qubits, data_qubits);
        let test = match flavor {
            SqkcFlavor::Shc => Vec::new(),
            SqkcFlavor::Ssc => register(1 + index_qubits + data_qubits, data_qubits),
        };
        let n_qubits = 1 + index_qubits + data_qubits + test.len();
        Self {
            flavor,
            ancilla: 0,
            index,
            data,
            test,
            n_qubits,
        }
    }

    /// Most significant index qubit, which carries the training label.
    pub fn class_qubit(&self) -> usize {
        *self.index.last().expect("index register is never empty")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegacyLayout {
    pub flavor: LegacyFlavor,
    pub ancilla: usize,
    pub data: Vec<usize>,
    pub test: Vec<usize>,
    pub class_qubit: usize,
    pub index: Vec<usize>,
    pub n_qubits: usize,
}

impl LegacyLayout {
    pub fn new(flavor: LegacyFlavor, index_qubits: usize, data_qubits: usize) -> Self {
        let data = register(1, data_qubits);
        let test = match flavor {
            LegacyFlavor::Hc => Vec::new(),
            LegacyFlavor::Sc => register(1 + data_qubits, data_qubits),
        };
        let class_qubit = 1 + data_qubits + test.len();
        let index = register(class_qubit + 1, index_qubits);
        let n_qubits = class_qubit + 1 + index_qubits;
        Self {
            flavor,
            ancilla: 0,
            data,
            test,
            class_qubit,
            index,
            n_qubits,
        }
    }
}

fn check_fits(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_QUBITS {
        return Err(QkcError::Capacity {
            requested: n_qubits,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Gates preparing `Σ_m √w_m |ψ(m)⟩|m⟩` with class-ordered indices.
pub fn sqkc_preparation<T: Real>(
    data: &EncodedDataset<T>,
    flavor: SqkcFlavor,
) -> Result<(SqkcLayout, Vec<GateSpec<T>>)> {
    let ordered = data.class_ordered();
    if flavor == SqkcFlavor::Shc && !ordered.is_real() {
        return Err(QkcError::ComplexFeatures("SHC"));
    }
    let layout = SqkcLayout::new(flavor, data.index_qubits(), qubits_for(ordered.dim()));
    check_fits(layout.n_qubits)?;
    let mut gates = Vec::with_capacity(ordered.len() + 4);
    gates.push(GateSpec::unitary(
        Matrix::state_preparation(&data.index_amplitudes())?,
        layout.index.clone(),
    )?);
    let test_u = encoding_unitary(ordered.test_features())?;
    match flavor {
        SqkcFlavor::Shc => {
            gates.push(GateSpec::h(layout.ancilla));
            for (x, &slot) in ordered.train_features().iter().zip(data.slots()) {
                gates.push(
                    GateSpec::unitary(encoding_unitary(x)?, layout.data.clone())?
                        .anti_controlled(layout.ancilla)
                        .controlled_on_value(&layout.index, slot),
                );
            }
            gates.push(GateSpec::unitary(test_u, layout.data.clone())?.controlled(layout.ancilla));
        }
        SqkcFlavor::Ssc => {
            for (x, &slot) in ordered.train_features().iter().zip(data.slots()) {
                gates.push(
                    GateSpec::unitary(encoding_unitary(x)?, layout.data.clone())?
                        .controlled_on_value(&layout.index, slot),
                );
            }
            gates.push(GateSpec::unitary(test_u, layout.test.clone())?);
        }
    }
    Ok((layout, gates))
}

/// Superposed dataset state of a simplified classifier.
pub fn prepare_sqkc_state<T: Real>(
    data: &EncodedDataset<T>,
    flavor: SqkcFlavor,
) -> Result<StateVector<T>> {
    let (layout, gates) = sqkc_preparation(data, flavor)?;
    let mut state = StateVector::new(layout.n_qubits)?;
    state.apply_all(&gates)?;
    Ok(state)
}

/// Gates preparing the legacy state with an explicit class qubit.
pub fn legacy_preparation<T: Real>(
    data: &LabeledDataset<T>,
    flavor: LegacyFlavor,
) -> Result<(LegacyLayout, Vec<GateSpec<T>>)> {
    if flavor == LegacyFlavor::Hc && !data.is_real() {
        return Err(QkcError::ComplexFeatures("HC"));
    }
    let index_qubits = qubits_for(data.len());
    let layout = LegacyLayout::new(flavor, index_qubits, qubits_for(data.dim()));
    check_fits(layout.n_qubits)?;
    let mut index_amps = vec![real(T::zero()); 1 << index_qubits];
    for (m, w) in data.weights().iter().enumerate() {
        index_amps[m] = real(w.sqrt());
    }
    let mut gates = vec![GateSpec::unitary(
        Matrix::state_preparation(&index_amps)?,
        layout.index.clone(),
    )?];
    let test_u = encoding_unitary(data.test_features())?;
    match flavor {
        LegacyFlavor::Hc => {
            gates.push(GateSpec::h(layout.ancilla));
            for (m, x) in data.train_features().iter().enumerate() {
                gates.push(
                    GateSpec::unitary(encoding_unitary(x)?, layout.data.clone())?
                        .anti_controlled(layout.ancilla)
                        .controlled_on_value(&layout.index, m),
                );
            }
            gates.push(GateSpec::unitary(test_u, layout.data.clone())?.controlled(layout.ancilla));
        }
        LegacyFlavor::Sc => {
            for (m, x) in data.train_features().iter().enumerate() {
                gates.push(
                    GateSpec::unitary(encoding_unitary(x)?, layout.data.clone())?
                        .controlled_on_value(&layout.index, m),
                );
            }
            gates.push(GateSpec::unitary(test_u, layout.test.clone())?);
        }
    }
    for (m, &y) in data.labels().iter().enumerate() {
        if y == 1 {
            gates.push(GateSpec::x(layout.class_qubit).controlled_on_value(&layout.index, m));
        }
    }
    Ok((layout, gates))
}

pub fn prepare_legacy_state<T: Real>(
    data: &LabeledDataset<T>,
    flavor: LegacyFlavor,
) -> Result<StateVector<T>> {
    let (layout, gates) = legacy_preparation(data, flavor)?;
    let mut state = StateVector::new(layout.n_qubits)?;
    state.apply_all(&gates)?;
    Ok(state)
}
