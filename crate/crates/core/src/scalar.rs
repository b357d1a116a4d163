//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All math is written against [`Real`], which combines nalgebra's
//! `RealField` (linear algebra, transcendental functions) with the
//! num-traits conversion traits. `f64` is the working precision for
//! physics runs; `f32` is supported for cheap exploratory evaluations.

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable in scalar type")
    }

    /// `e^{iθ}`.
    #[inline]
    fn cis(theta: Self) -> Complex<Self> {
        Complex::new(theta.cos(), theta.sin())
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Principal-branch complex logarithm.
#[inline]
pub(crate) fn cln<T: Real>(z: Complex<T>) -> Complex<T> {
    let modulus = (z.re * z.re + z.im * z.im).sqrt();
    Complex::new(modulus.ln(), z.im.atan2(z.re))
}

/// Principal-branch complex square root.
#[inline]
pub(crate) fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let modulus = (z.re * z.re + z.im * z.im).sqrt();
    let half = T::lit(0.5);
    let a = ((modulus + z.re) * half).max(T::zero()).sqrt();
    let b = ((modulus - z.re) * half).max(T::zero()).sqrt();
    Complex::new(a, if z.im < T::zero() { -b } else { b })
}

/// Integer power of a complex number by repeated squaring.
pub(crate) fn cpowi<T: Real>(z: Complex<T>, mut e: u32) -> Complex<T> {
    let mut base = z;
    let mut acc = Complex::new(T::one(), T::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

#[inline]
pub(crate) fn cabs<T: Real>(z: Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}
