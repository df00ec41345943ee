//! Central tolerance constants.

/// Exact-algebra tolerance in double precision.
pub const EXACT: f64 = 1e-10;

/// Exact-algebra tolerance used when the scalar is `f32`.
pub const EXACT_F32: f64 = 1e-5;

/// Largest register the dense simulator will allocate.
pub const MAX_QUBITS: usize = 24;

/// Largest register that is fused into a dense matrix for phase estimation.
pub const MAX_FUSED_QUBITS: usize = 8;
