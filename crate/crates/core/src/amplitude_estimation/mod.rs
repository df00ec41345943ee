//! Amplitude estimation over an arbitrary state-preparation circuit.
//!
//! `A|0⟩ = sin θ |good⟩ + cos θ |bad⟩` with `a = sin²θ`. The Grover operator
//! rotates by `2θ` inside that plane, so phase estimation on it reads `θ`,
//! and repeated application followed by sampling feeds the likelihood-based
//! estimators.

mod mle;
mod mlqae;
mod qae;

use serde::{Deserialize, Serialize};

use crate::error::{QkcError, Result};
use crate::scalar::Real;
use crate::sim::{adjoint_circuit, Control, GateSpec, StateVector};
use crate::tolerance::MAX_QUBITS;

pub use mle::{
    maximize_on_quarter_turn, mle_postprocess, mle_postprocess_weights, qpe_outcome_probability,
    MleSearch,
};
pub use mlqae::{
    mlqae_from_probabilities, mlqae_round_probabilities, run_mlqae, MlqaeConfig, MlqaeEstimate,
};
pub use qae::{
    a_of_y, estimate_from_counts, qae_error_bound, qae_exact_distribution,
    qae_outcome_distribution, qpe_circuit, qpe_pmf_closed_form, run_qae, sample_qae, QaeConfig,
    QaeDistribution, QaeEstimate, QpeMode,
};

/// Which single-qubit outcome counts as "good".
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    #[default]
    ProbOne,
    ProbZero,
}

impl Target {
    pub fn outcome(self) -> bool {
        matches!(self, Target::ProbOne)
    }
}

/// The operator `A` together with its good-state marker.
#[derive(Clone, Debug)]
pub struct StatePrepOracle<T: Real> {
    circuit: Vec<GateSpec<T>>,
    n_qubits: usize,
    good_qubit: usize,
    target: Target,
}

impl<T: Real> StatePrepOracle<T> {
    pub fn new(
        circuit: Vec<GateSpec<T>>,
        n_qubits: usize,
        good_qubit: usize,
        target: Target,
    ) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(QkcError::Capacity {
                requested: n_qubits,
                limit: MAX_QUBITS,
            });
        }
        if good_qubit >= n_qubits {
            return Err(QkcError::IndexOutOfRange {
                index: good_qubit,
                n_qubits,
            });
        }
        for gate in &circuit {
            gate.validate(n_qubits)?;
        }
        Ok(Self {
            circuit,
            n_qubits,
            good_qubit,
            target,
        })
    }

    /// One-qubit oracle `RY(2 asin √a)` with `Pr(1) = a`.
    pub fn synthetic(a: T) -> Result<Self> {
        if !(T::zero()..=T::one()).contains(&a) {
            return Err(QkcError::InvalidConfig(format!(
                "probability {a} outside [0, 1]"
            )));
        }
        let angle = T::lit(2.0) * a.sqrt().asin();
        Self::new(vec![GateSpec::ry(0, angle)], 1, 0, Target::ProbOne)
    }

    pub fn circuit(&self) -> &[GateSpec<T>] {
        &self.circuit
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn good_qubit(&self) -> usize {
        self.good_qubit
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn with_target(mut self, target: Target) -> Self {
        self.target = target;
        self
    }

    /// `A|0…0⟩`.
    pub fn prepared_state(&self) -> Result<StateVector<T>> {
        let mut s = StateVector::new(self.n_qubits)?;
        s.apply_all(&self.circuit)?;
        Ok(s)
    }

    pub fn good_probability(&self, state: &StateVector<T>) -> Result<T> {
        state.probability(self.good_qubit, self.target.outcome())
    }

    /// Exact amplitude `a` being estimated.
    pub fn probability(&self) -> Result<T> {
        self.good_probability(&self.prepared_state()?)
    }
}

/// One Grover iteration `Q = -A S_0 A† S_χ` as a gate list.
///
/// `S_χ` flips the sign of good states and `S_0 = I - 2|0⟩⟨0|` is realized
/// as a multi-controlled Z between layers of X. The trailing `-1` keeps the
/// eigenphases at `±2θ`; without it phase estimation reads `π/2 - θ` and
/// the estimate becomes `1 - a`.
pub fn build_grover<T: Real>(oracle: &StatePrepOracle<T>) -> Vec<GateSpec<T>> {
    let n = oracle.n_qubits();
    let g = oracle.good_qubit();
    let mut q = Vec::with_capacity(2 * oracle.circuit().len() + 2 * n + 4);
    match oracle.target() {
        Target::ProbOne => q.push(GateSpec::z(g)),
        Target::ProbZero => {
            q.push(GateSpec::x(g));
            q.push(GateSpec::z(g));
            q.push(GateSpec::x(g));
        }
    }
    q.extend(adjoint_circuit(oracle.circuit()));
    q.extend((0..n).map(GateSpec::x));
    q.push(GateSpec::z(0).with_controls((1..n).map(Control::one)));
    q.extend((0..n).map(GateSpec::x));
    q.extend(oracle.circuit().iter().cloned());
    q.push(GateSpec::global_phase(T::PI()));
    q
}

/// `Q^k A|0⟩`.
pub fn amplified_state<T: Real>(oracle: &StatePrepOracle<T>, k: u64) -> Result<StateVector<T>> {
    let grover = build_grover(oracle);
    let mut s = oracle.prepared_state()?;
    for _ in 0..k {
        s.apply_all(&grover)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grover_rotates_quarter_to_certainty() {
        let oracle = StatePrepOracle::synthetic(0.25f64).unwrap();
        let s = amplified_state(&oracle, 1).unwrap();
        assert_abs_diff_eq!(oracle.good_probability(&s).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn grover_leaves_zero_amplitude_alone() {
        let oracle = StatePrepOracle::synthetic(0.0f64).unwrap();
        let s = amplified_state(&oracle, 3).unwrap();
        assert_abs_diff_eq!(oracle.good_probability(&s).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn prob_zero_target_measures_complement() {
        let oracle = StatePrepOracle::synthetic(0.3f64)
            .unwrap()
            .with_target(Target::ProbZero);
        assert_abs_diff_eq!(oracle.probability().unwrap(), 0.7, epsilon = 1e-12);
        let theta = 0.7f64.sqrt().asin();
        let s = amplified_state(&oracle, 2).unwrap();
        assert_abs_diff_eq!(
            oracle.good_probability(&s).unwrap(),
            (5.0 * theta).sin().powi(2),
            epsilon = 1e-12
        );
    }

    #[test]
    fn grover_is_unitary_on_three_qubits() {
        let circuit = vec![
            GateSpec::h(0),
            GateSpec::ry(1, 0.4f64),
            GateSpec::cnot(1, 2),
            GateSpec::ry(2, 1.1).controlled(0),
        ];
        let oracle = StatePrepOracle::new(circuit, 3, 2, Target::ProbOne).unwrap();
        let q = crate::sim::circuit_unitary(&build_grover(&oracle), 3).unwrap();
        assert!(q.is_unitary(1e-12));
    }

    #[test]
    fn oracle_validation() {
        assert!(StatePrepOracle::<f64>::new(vec![], 2, 2, Target::ProbOne).is_err());
        assert!(StatePrepOracle::new(vec![GateSpec::<f64>::h(3)], 2, 0, Target::ProbOne).is_err());
        assert!(StatePrepOracle::synthetic(1.5f64).is_err());
    }
}
