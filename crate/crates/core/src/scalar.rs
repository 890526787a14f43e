//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All math is written once against [`Real`], which is implemented for `f32`
//! and `f64`. The tolerances quoted throughout the documentation are for
//! `f64`; routines that compare against a fixed threshold clamp it from below
//! with [`Real::tol`] so the same code stays meaningful in single precision.

use std::fmt::{Debug, Display};

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar usable by the solvers.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + rustfft::FftNum + Default + Display + Debug {
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("representable count")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// `threshold` clamped from below by a small multiple of machine epsilon.
    #[inline]
    fn tol(threshold: f64) -> Self {
        let floor = Self::default_epsilon() * Self::lit(64.0);
        Self::lit(threshold).max(floor)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Wrap an angle into `(-π, π]`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let two_pi = T::two_pi();
    let mut r = theta % two_pi;
    if r > T::pi() {
        r -= two_pi;
    } else if r <= -T::pi() {
        r += two_pi;
    }
    r
}

#[inline]
pub fn arg<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

#[inline]
pub fn modulus<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// `k^ℓ` by repeated multiplication.
#[inline]
pub fn int_pow<T: Real>(base: T, exp: usize) -> T {
    let mut acc = T::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

pub fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from_count(i))
}
