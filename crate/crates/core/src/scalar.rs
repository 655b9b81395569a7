//! Real and complex double-precision scalar fields.
//!
//! Every matrix, vector and factorization in the crate is generic over
//! [`Scalar`]. Mixing fields inside one computation requires promoting the
//! real operand explicitly (see [`crate::SparseMatrix::to_complex`]).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex64;
use num_traits::NumAssign;

/// A double-precision field element: `f64` or `Complex64`.
pub trait Scalar:
    NumAssign
    + Copy
    + Debug
    + Display
    + Default
    + PartialEq
    + Send
    + Sync
    + Sum
    + std::ops::Neg<Output = Self>
    + 'static
{
    /// Whether this is the complex field.
    const IS_COMPLEX: bool;

    fn from_f64(re: f64) -> Self;

    /// Builds a scalar from real and imaginary parts. Fails (returns `None`)
    /// for the real field when `im != 0`.
    fn from_parts(re: f64, im: f64) -> Option<Self>;

    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conj(self) -> Self;

    /// Modulus.
    fn modulus(self) -> f64;

    /// Squared modulus.
    fn modulus_sqr(self) -> f64;

    /// Multiplies by a real factor.
    fn scale(self, s: f64) -> Self;

    fn is_finite(self) -> bool;

    fn to_complex(self) -> Complex64 {
        Complex64::new(self.re(), self.im())
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    #[inline]
    fn from_f64(re: f64) -> Self {
        re
    }

    fn from_parts(re: f64, im: f64) -> Option<Self> {
        (im == 0.0).then_some(re)
    }

    #[inline]
    fn re(self) -> f64 {
        self
    }

    #[inline]
    fn im(self) -> f64 {
        0.0
    }

    #[inline]
    fn conj(self) -> Self {
        self
    }

    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }

    #[inline]
    fn modulus_sqr(self) -> f64 {
        self * self
    }

    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }

    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    #[inline]
    fn from_f64(re: f64) -> Self {
        Complex64::new(re, 0.0)
    }

    fn from_parts(re: f64, im: f64) -> Option<Self> {
        Some(Complex64::new(re, im))
    }

    #[inline]
    fn re(self) -> f64 {
        self.re
    }

    #[inline]
    fn im(self) -> f64 {
        self.im
    }

    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }

    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }

    #[inline]
    fn modulus_sqr(self) -> f64 {
        self.norm_sqr()
    }

    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }

    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Euclidean norm of a vector.
pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    // scaled accumulation avoids overflow on badly scaled iterates
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.modulus()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let inv = 1.0 / scale;
    let ssq: f64 = x.iter().map(|v| v.scale(inv).modulus_sqr()).sum();
    scale * ssq.sqrt()
}

/// Inner product `xᴴ y` (conjugates the left argument).
pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter()
        .zip(y)
        .fold(T::zero(), |acc, (&a, &b)| acc + a.conj() * b)
}

/// `y += alpha * x`
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_from_parts_rejects_imaginary() {
        assert_eq!(f64::from_parts(1.5, 0.0), Some(1.5));
        assert_eq!(f64::from_parts(1.5, 2.0), None);
    }

    #[test]
    fn complex_dot_conjugates_left() {
        let x = [Complex64::new(0.0, 1.0)];
        assert_eq!(dot(&x, &x), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn norm2_handles_huge_entries() {
        let v = [3e200, 4e200];
        assert!((norm2(&v) / 5e200 - 1.0).abs() < 1e-15);
        assert_eq!(norm2::<f64>(&[]), 0.0);
    }
}
