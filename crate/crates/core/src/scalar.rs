//! Scalar abstraction shared by the numerical kernels.
//!
//! Everything that touches sampled fields, spectra or lattices is generic
//! over [`Real`], which is satisfied by `f32` and `f64`. Configuration and
//! physical-unit bookkeeping stay in `f64`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point type usable by the signal-processing kernels.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Default
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex sample over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a count into `T`.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// Widens a scalar to `f64` (used for reporting and error payloads).
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `e^{jθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Cplx<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

/// Unnormalized cardinal sine `sin(x)/x`.
#[inline]
pub fn sinc_unnorm<T: Real>(x: T) -> T {
    if x.abs() < lit(1e-8) {
        T::one() - x * x / lit(6.0)
    } else {
        x.sin() / x
    }
}

/// Normalized cardinal sine `sin(πu)/(πu)`, exactly zero at nonzero integers.
#[inline]
pub fn sinc_norm<T: Real>(u: T) -> T {
    if u == T::zero() {
        return T::one();
    }
    if u.fract() == T::zero() {
        return T::zero();
    }
    sinc_unnorm(u * T::PI())
}

/// Sum of squared magnitudes.
pub fn energy<T: Real>(v: &[Cplx<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Relative L2 distance `‖a − b‖ / ‖b‖` (absolute when `b` is zero).
pub fn rel_l2<T: Real>(a: &[Cplx<T>], b: &[Cplx<T>]) -> T {
    let num: T = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den = energy(b);
    if den == T::zero() {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}
