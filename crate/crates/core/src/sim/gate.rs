use std::collections::HashSet;

use crate::error::{QkcError, Result};
use crate::scalar::Real;
use crate::sim::Matrix;

/// Control condition on a single qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    /// `true` fires on |1⟩, `false` on |0⟩.
    pub on_one: bool,
}

impl Control {
    pub fn one(qubit: usize) -> Self {
        Self {
            qubit,
            on_one: true,
        }
    }

    pub fn zero(qubit: usize) -> Self {
        Self {
            qubit,
            on_one: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind<T: Real> {
    H,
    X,
    Z,
    /// `exp(-i θ Y / 2)`.
    Ry(T),
    /// `diag(1, e^{iφ})`.
    Phase(T),
    /// Scalar `e^{iφ}` on the whole register; observable only when controlled.
    GlobalPhase(T),
    Swap,
    /// `|j⟩ → 2^{-n/2} Σ_k e^{2πi jk/2^n} |k⟩`, with `targets[0]` the least
    /// significant bit of `j` and `k`.
    Qft,
    QftInverse,
    /// Dense unitary on `targets`, `targets[0]` being the least significant
    /// bit of the local index.
    Unitary(Matrix<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec<T: Real> {
    pub kind: GateKind<T>,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl<T: Real> GateSpec<T> {
    pub fn new(kind: GateKind<T>, targets: Vec<usize>) -> Self {
        Self {
            kind,
            targets,
            controls: Vec::new(),
        }
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q])
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q])
    }

    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, vec![q])
    }

    pub fn ry(q: usize, angle: T) -> Self {
        Self::new(GateKind::Ry(angle), vec![q])
    }

    pub fn phase(q: usize, angle: T) -> Self {
        Self::new(GateKind::Phase(angle), vec![q])
    }

    pub fn global_phase(angle: T) -> Self {
        Self::new(GateKind::GlobalPhase(angle), Vec::new())
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap, vec![a, b])
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::x(target).controlled(control)
    }

    pub fn qft(targets: Vec<usize>) -> Self {
        Self::new(GateKind::Qft, targets)
    }

    pub fn qft_inverse(targets: Vec<usize>) -> Self {
        Self::new(GateKind::QftInverse, targets)
    }

    /// Checked constructor for a dense unitary gate.
    pub fn unitary(matrix: Matrix<T>, targets: Vec<usize>) -> Result<Self> {
        let gate = Self::new(GateKind::Unitary(matrix), targets);
        gate.check_matrix()?;
        Ok(gate)
    }

    pub fn controlled(mut self, qubit: usize) -> Self {
        self.controls.push(Control::one(qubit));
        self
    }

    pub fn anti_controlled(mut self, qubit: usize) -> Self {
        self.controls.push(Control::zero(qubit));
        self
    }

    pub fn with_controls(mut self, controls: impl IntoIterator<Item = Control>) -> Self {
        self.controls.extend(controls);
        self
    }

    /// Controls that fire when the register `qubits` (LSB first) holds `value`.
    pub fn controlled_on_value(self, qubits: &[usize], value: usize) -> Self {
        let controls = qubits
            .iter()
            .enumerate()
            .map(|(bit, &q)| Control {
                qubit: q,
                on_one: (value >> bit) & 1 == 1,
            })
            .collect::<Vec<_>>();
        self.with_controls(controls)
    }

    /// Inverse gate with the same controls.
    pub fn adjoint(&self) -> Self {
        let kind = match &self.kind {
            GateKind::Ry(a) => GateKind::Ry(-*a),
            GateKind::Phase(a) => GateKind::Phase(-*a),
            GateKind::GlobalPhase(a) => GateKind::GlobalPhase(-*a),
            GateKind::Qft => GateKind::QftInverse,
            GateKind::QftInverse => GateKind::Qft,
            GateKind::Unitary(m) => GateKind::Unitary(m.adjoint()),
            other => other.clone(),
        };
        Self {
            kind,
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }

    /// Same gate with every qubit index moved up by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        Self {
            kind: self.kind.clone(),
            targets: self.targets.iter().map(|q| q + offset).collect(),
            controls: self
                .controls
                .iter()
                .map(|c| Control {
                    qubit: c.qubit + offset,
                    on_one: c.on_one,
                })
                .collect(),
        }
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets
            .iter()
            .copied()
            .chain(self.controls.iter().map(|c| c.qubit))
    }

    fn check_matrix(&self) -> Result<()> {
        if let GateKind::Unitary(m) = &self.kind {
            let expected = 1usize << self.targets.len();
            if m.dim() != expected {
                return Err(QkcError::DimensionMismatch {
                    expected,
                    found: m.dim(),
                });
            }
            let deviation = m.unitarity_deviation();
            if deviation > T::exact_tol().as_f64() {
                return Err(QkcError::NonUnitary { deviation });
            }
        }
        Ok(())
    }

    /// Validates indices and shape against an `n_qubits` register.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let arity_ok = match &self.kind {
            GateKind::H | GateKind::X | GateKind::Z | GateKind::Ry(_) | GateKind::Phase(_) => {
                self.targets.len() == 1
            }
            GateKind::GlobalPhase(_) => self.targets.is_empty(),
            GateKind::Swap => self.targets.len() == 2,
            GateKind::Qft | GateKind::QftInverse | GateKind::Unitary(_) => !self.targets.is_empty(),
        };
        if !arity_ok {
            return Err(QkcError::InvalidGate(format!(
                "{:?} cannot act on {} targets",
                self.kind_name(),
                self.targets.len()
            )));
        }
        let mut seen = HashSet::new();
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(QkcError::IndexOutOfRange { index: q, n_qubits });
            }
            if !seen.insert(q) {
                return Err(QkcError::InvalidGate(format!(
                    "qubit {q} used more than once by {}",
                    self.kind_name()
                )));
            }
        }
        self.check_matrix()
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Ry(_) => "RY",
            GateKind::Phase(_) => "PHASE",
            GateKind::GlobalPhase(_) => "GLOBAL_PHASE",
            GateKind::Swap => "SWAP",
            GateKind::Qft => "QFT",
            GateKind::QftInverse => "QFT_INVERSE",
            GateKind::Unitary(_) => "UNITARY",
        }
    }
}

/// Inverse of a whole circuit.
pub fn adjoint_circuit<T: Real>(circuit: &[GateSpec<T>]) -> Vec<GateSpec<T>> {
    circuit.iter().rev().map(GateSpec::adjoint).collect()
}

/// QFT expressed with H, controlled phases and swaps.
pub(crate) fn qft_decomposition<T: Real>(targets: &[usize], inverse: bool) -> Vec<GateSpec<T>> {
    let n = targets.len();
    let mut gates = Vec::with_capacity(n * (n + 1) / 2 + n / 2);
    for i in (0..n).rev() {
        gates.push(GateSpec::h(targets[i]));
        for j in (0..i).rev() {
            let angle = T::PI() / T::lit((1u64 << (i - j)) as f64);
            gates.push(GateSpec::phase(targets[i], angle).controlled(targets[j]));
        }
    }
    for i in 0..n / 2 {
        gates.push(GateSpec::swap(targets[i], targets[n - 1 - i]));
    }
    if inverse {
        adjoint_circuit(&gates)
    } else {
        gates
    }
}
