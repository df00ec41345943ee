use num_complex::Complex;

use crate::error::{QkcError, Result};
use crate::scalar::{real, Real};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T: Real> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = real(T::one());
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(QkcError::Empty("matrix rows"));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(QkcError::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| real(T::lit(x))).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex<T>) {
        self.data[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Complex<T>] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(QkcError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let n = self.dim;
        let zero = Complex::new(T::zero(), T::zero());
        let mut data = vec![zero; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == zero {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                let out_row = &mut data[r * n..(r + 1) * n];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { dim: n, data })
    }

    /// `self^(2^k)` by repeated squaring.
    pub fn pow2(&self, k: u32) -> Self {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.matmul(&out).expect("square");
        }
        out
    }

    /// One Newton–Schulz step `U (3I - U†U) / 2` towards the nearest
    /// unitary. Removes drift that builds up over long squaring chains.
    pub fn reunitarize(&self) -> Self {
        let gram = self.adjoint().matmul(self).expect("square");
        let mut corr = gram;
        let half = T::lit(0.5);
        for r in 0..self.dim {
            for c in 0..self.dim {
                let diag = if r == c { T::lit(1.5) } else { T::zero() };
                let v = real::<T>(diag) - corr.get(r, c) * real(half);
                corr.set(r, c, v);
            }
        }
        self.matmul(&corr).expect("square")
    }

    /// Largest entry of `|U U† - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.matmul(&self.adjoint()).expect("square");
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let target = if r == c { T::one() } else { T::zero() };
                let d = (prod.get(r, c) - real(target)).norm().as_f64();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_deviation() <= tol.as_f64()
    }

    pub fn apply_to(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.dim)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                        acc + a * b
                    })
            })
            .collect()
    }

    /// Unitary whose first column is the unit vector `target`.
    ///
    /// Built as a phased Householder reflection, so it is exactly Hermitian up
    /// to the phase and needs no orthogonalization.
    pub fn state_preparation(target: &[Complex<T>]) -> Result<Self> {
        let n = target.len();
        if n == 0 {
            return Err(QkcError::Empty("state preparation target"));
        }
        let norm = target.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if (norm - T::one()).abs() > T::exact_tol().sqrt() {
            return Err(QkcError::InvalidGate(format!(
                "state preparation target has norm {norm}"
            )));
        }
        let phase = if target[0].norm() > T::zero() {
            target[0] / real(target[0].norm())
        } else {
            real(T::one())
        };
        // u = e0 - conj(phase) * target; U = phase * (I - 2 u u† / |u|^2)
        let mut u: Vec<Complex<T>> = target.iter().map(|a| -(phase.conj() * a)).collect();
        u[0] += real(T::one());
        let u_norm_sqr: T = u.iter().map(|a| a.norm_sqr()).sum();
        let mut m = Self::identity(n);
        if u_norm_sqr > T::epsilon() {
            let two = T::lit(2.0) / u_norm_sqr;
            for r in 0..n {
                for c in 0..n {
                    let v = m.get(r, c) - u[r] * u[c].conj() * real(two);
                    m.set(r, c, v);
                }
            }
        }
        for entry in m.data.iter_mut() {
            *entry = phase * *entry;
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn state_preparation_maps_zero_to_target() {
        let s = 1.0 / 3.0f64.sqrt();
        let target = vec![cplx(0.0, s), cplx(s, 0.0), cplx(0.0, 0.0), cplx(-s, 0.0)];
        let u = Matrix::state_preparation(&target).unwrap();
        assert!(u.is_unitary(1e-12));
        for (r, t) in target.iter().enumerate() {
            assert!((u.get(r, 0) - t).norm() < 1e-12);
        }
    }

    #[test]
    fn reunitarize_pulls_drift_back() {
        let (c, s) = (0.6f64, 0.8f64);
        let m = Matrix::<f64>::from_real_rows(&[&[c * 1.000001, -s], &[s, c]]).unwrap();
        assert!(m.unitarity_deviation() > 1e-7);
        assert!(m.reunitarize().unitarity_deviation() < 1e-11);
        let u = Matrix::<f64>::from_real_rows(&[&[c, -s], &[s, c]]).unwrap();
        let v = u.reunitarize();
        assert!((v.get(0, 1) - u.get(0, 1)).norm() < 1e-15);
    }

    #[test]
    fn state_preparation_of_basis_state_is_identity() {
        let target = vec![real(1.0f64), real(0.0)];
        let u = Matrix::state_preparation(&target).unwrap();
        assert_eq!(u, Matrix::identity(2));
    }

    #[test]
    fn pow2_matches_repeated_product() {
        let h = 1.0 / 2.0f64.sqrt();
        let m = Matrix::<f64>::from_real_rows(&[&[h, h], &[h, -h]]).unwrap();
        let z = m
            .matmul(&Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap())
            .unwrap();
        let direct = (0..7).fold(Matrix::identity(2), |acc, _| acc.matmul(&z).unwrap());
        let direct = direct.matmul(&z).unwrap();
        let fast = z.pow2(3);
        for r in 0..2 {
            for c in 0..2 {
                assert!((fast.get(r, c) - direct.get(r, c)).norm() < 1e-12);
            }
        }
    }
}
