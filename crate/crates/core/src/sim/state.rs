use num_complex::Complex;

use crate::error::{QkcError, Result};
use crate::scalar::{cplx, real, Real};
use crate::sim::gate::{qft_decomposition, GateKind, GateSpec};
use crate::sim::Matrix;
use crate::tolerance::MAX_QUBITS;

/// Dense pure state over `n_qubits` qubits.
///
/// Qubit `q` is bit `q` of the amplitude index (little-endian).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// |0…0⟩ on `n_qubits` qubits.
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amplitudes[0] = real(T::one());
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QkcError::DimensionMismatch {
                expected: len.next_power_of_two().max(2),
                found: len,
            });
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_capacity(n_qubits)?;
        let state = Self {
            n_qubits,
            amplitudes,
        };
        let dev = (state.norm_sqr() - T::one()).abs();
        if dev > T::exact_tol() {
            return Err(QkcError::InvalidDataset(format!(
                "amplitudes are not normalized (|norm²-1| = {dev:e})"
            )));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex<T>> {
        if self.n_qubits != other.n_qubits {
            return Err(QkcError::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(cplx(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn apply_all<'a>(
        &mut self,
        gates: impl IntoIterator<Item = &'a GateSpec<T>>,
    ) -> Result<()> {
        for gate in gates {
            self.apply(gate)?;
        }
        Ok(())
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &GateSpec<T>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        let mut ctrl_mask = 0usize;
        let mut ctrl_value = 0usize;
        for c in &gate.controls {
            ctrl_mask |= 1 << c.qubit;
            if c.on_one {
                ctrl_value |= 1 << c.qubit;
            }
        }
        let cond = Condition {
            mask: ctrl_mask,
            value: ctrl_value,
        };
        let half = T::FRAC_1_SQRT_2();
        match &gate.kind {
            GateKind::H => self.apply_1q(gate.targets[0], cond, |a, b| {
                ((a + b) * real(half), (a - b) * real(half))
            }),
            GateKind::X => self.apply_1q(gate.targets[0], cond, |a, b| (b, a)),
            GateKind::Z => self.apply_1q(gate.targets[0], cond, |a, b| (a, -b)),
            GateKind::Ry(theta) => {
                let (s, c) = (*theta / T::lit(2.0)).sin_cos();
                self.apply_1q(gate.targets[0], cond, |a, b| {
                    (a * real(c) - b * real(s), a * real(s) + b * real(c))
                })
            }
            GateKind::Phase(phi) => {
                let p = Complex::from_polar(T::one(), *phi);
                self.apply_1q(gate.targets[0], cond, |a, b| (a, b * p))
            }
            GateKind::GlobalPhase(phi) => {
                let p = Complex::from_polar(T::one(), *phi);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    if cond.holds(i) {
                        *amp *= p;
                    }
                }
            }
            GateKind::Swap => self.apply_swap(gate.targets[0], gate.targets[1], cond),
            GateKind::Qft | GateKind::QftInverse => {
                let inverse = matches!(gate.kind, GateKind::QftInverse);
                for g in qft_decomposition::<T>(&gate.targets, inverse) {
                    let g = g.with_controls(gate.controls.iter().copied());
                    self.apply(&g)?;
                }
            }
            GateKind::Unitary(m) => {
                if gate.targets.len() == 1 {
                    let (m00, m01, m10, m11) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
                    self.apply_1q(gate.targets[0], cond, |a, b| {
                        (m00 * a + m01 * b, m10 * a + m11 * b)
                    })
                } else {
                    self.apply_dense(m, &gate.targets, cond)
                }
            }
        }
        Ok(())
    }

    fn apply_1q<F>(&mut self, target: usize, cond: Condition, f: F)
    where
        F: Fn(Complex<T>, Complex<T>) -> (Complex<T>, Complex<T>),
    {
        let bit = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & bit != 0 || !cond.holds(i) {
                continue;
            }
            let j = i | bit;
            let (a, b) = f(self.amplitudes[i], self.amplitudes[j]);
            self.amplitudes[i] = a;
            self.amplitudes[j] = b;
        }
    }

    fn apply_swap(&mut self, qa: usize, qb: usize, cond: Condition) {
        let (ba, bb) = (1usize << qa, 1usize << qb);
        for i in 0..self.amplitudes.len() {
            // visit each pair once: qa set, qb clear
            if i & ba == 0 || i & bb != 0 || !cond.holds(i) {
                continue;
            }
            let j = (i & !ba) | bb;
            self.amplitudes.swap(i, j);
        }
    }

    fn apply_dense(&mut self, m: &Matrix<T>, targets: &[usize], cond: Condition) {
        let k = targets.len();
        let local = 1usize << k;
        let target_mask = targets.iter().fold(0usize, |acc, q| acc | (1 << q));
        let offsets: Vec<usize> = (0..local)
            .map(|l| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| (l >> bit) & 1 == 1)
                    .fold(0usize, |acc, (_, q)| acc | (1 << q))
            })
            .collect();
        let mut buf = vec![cplx(T::zero(), T::zero()); local];
        for base in 0..self.amplitudes.len() {
            if base & target_mask != 0 || !cond.holds(base) {
                continue;
            }
            for (slot, off) in buf.iter_mut().zip(&offsets) {
                *slot = self.amplitudes[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                self.amplitudes[base | off] = m
                    .row(r)
                    .iter()
                    .zip(&buf)
                    .fold(cplx(T::zero(), T::zero()), |acc, (a, b)| acc + a * b);
            }
        }
    }

    /// Tensor product `self ⊗ high`, with `self` occupying the low qubits.
    pub fn tensor(&self, high: &Self) -> Result<Self> {
        let n = self.n_qubits + high.n_qubits;
        check_capacity(n)?;
        let mut amplitudes = Vec::with_capacity(1 << n);
        for h in &high.amplitudes {
            for l in &self.amplitudes {
                amplitudes.push(l * h);
            }
        }
        Ok(Self {
            n_qubits: n,
            amplitudes,
        })
    }
}

#[derive(Clone, Copy)]
struct Condition {
    mask: usize,
    value: usize,
}

impl Condition {
    #[inline]
    fn holds(self, index: usize) -> bool {
        index & self.mask == self.value
    }
}

pub(crate) fn check_capacity(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(QkcError::Capacity {
            requested: n_qubits,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Dense matrix of a circuit on `n_qubits`, column `j` being `C|j⟩`.
pub fn circuit_unitary<T: Real>(circuit: &[GateSpec<T>], n_qubits: usize) -> Result<Matrix<T>> {
    if n_qubits > crate::tolerance::MAX_FUSED_QUBITS {
        return Err(QkcError::Capacity {
            requested: n_qubits,
            limit: crate::tolerance::MAX_FUSED_QUBITS,
        });
    }
    let dim = 1usize << n_qubits;
    let mut out = Matrix::identity(dim);
    for col in 0..dim {
        let mut amps = vec![cplx(T::zero(), T::zero()); dim];
        amps[col] = real(T::one());
        let mut s = StateVector {
            n_qubits,
            amplitudes: amps,
        };
        s.apply_all(circuit)?;
        for (row, a) in s.amplitudes.iter().enumerate() {
            out.set(row, col, *a);
        }
    }
    Ok(out)
}
