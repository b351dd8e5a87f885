//! Floating point scalar abstraction.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar the library is generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Absolute tolerance for quantities that cancel analytically
    /// (imaginary residues of pairing sums, Hermitian checks).
    fn cancel_tol() -> Self;

    /// Literal conversion for constants known to be representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable in scalar type")
    }
}

impl Scalar for f32 {
    fn cancel_tol() -> Self {
        1e-3
    }
}

impl Scalar for f64 {
    fn cancel_tol() -> Self {
        1e-10
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase<T: Scalar>(x: T) -> T {
    let two_pi = T::TAU();
    let mut r = x % two_pi;
    if r < T::zero() {
        r += two_pi;
    }
    // r in [0, 2pi)
    if r > T::PI() {
        r - two_pi
    } else {
        r
    }
}

/// Distance between two angles on the circle, in `[0, pi]`.
pub fn wrapped_distance<T: Scalar>(a: T, b: T) -> T {
    wrap_phase(a - b).abs()
}

/// `exp(i x)`.
#[inline]
pub fn cis<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x.cos(), x.sin())
}
