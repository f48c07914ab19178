//! Floating-point bound shared by the scalar-generic modules.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Binary floating point usable as the real part of the working complex type.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn count(n: usize) -> Self {
        Self::from_f64(n as f64).expect("count representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

pub(crate) fn cz<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

pub(crate) fn c1<T: Real>() -> C<T> {
    C::new(T::one(), T::zero())
}

/// `i^m` for any integer `m`.
pub(crate) fn ipow<T: Real>(m: i64) -> C<T> {
    match m.rem_euclid(4) {
        0 => C::new(T::one(), T::zero()),
        1 => C::new(T::zero(), T::one()),
        2 => C::new(-T::one(), T::zero()),
        _ => C::new(T::zero(), -T::one()),
    }
}

pub(crate) fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, j| acc * T::count(j))
}
