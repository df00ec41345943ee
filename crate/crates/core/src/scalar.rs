//! Scalar abstraction shared by the simulator and the classifiers.
//!
//! Everything numeric in the crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. Experiment statistics are always
//! carried out in `f64`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type usable as the real part of a probability amplitude.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Tolerance for identities that hold exactly in real arithmetic
    /// (normalization, unitarity, weight sums).
    fn exact_tol() -> Self;

    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f64 {
    #[inline]
    fn exact_tol() -> Self {
        crate::tolerance::EXACT
    }
}

impl Real for f32 {
    #[inline]
    fn exact_tol() -> Self {
        crate::tolerance::EXACT_F32 as f32
    }
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn real<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Number of qubits needed to hold `n` basis states (at least one).
pub fn qubits_for(n: usize) -> usize {
    let mut q = 0;
    while (1usize << q) < n {
        q += 1;
    }
    q.max(1)
}
