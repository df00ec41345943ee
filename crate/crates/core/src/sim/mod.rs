//! Dense statevector engine.

mod gate;
mod matrix;
mod measure;
mod state;

pub use gate::{adjoint_circuit, Control, GateKind, GateSpec};
pub use matrix::Matrix;
pub use measure::{sample_distribution, ShotCounts};
pub use state::{circuit_unitary, StateVector};

/// `|0…0⟩` on `n_qubits` qubits.
pub fn new_state<T: crate::Real>(n_qubits: usize) -> crate::Result<StateVector<T>> {
    StateVector::new(n_qubits)
}
