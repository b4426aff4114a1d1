//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar the library is generic over.
///
/// Method calls such as `sqrt`, `ln` and `abs` resolve through
/// [`RealField`]; conversions go through `num-traits`.
pub trait Real:
    RealField
    + Copy
    + FromPrimitive
    + ToPrimitive
    + Display
    + LowerExp
    + Debug
    + Default
    + Send
    + Sync
    + 'static
{
    /// Smallest tolerance this precision can honour. Tolerances requested
    /// below it are raised to it.
    const TOLERANCE_FLOOR: f64;

    /// Lift an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Tolerance `t` adjusted for the working precision.
    #[inline]
    fn tol(t: f64) -> Self {
        Self::lit(t.max(Self::TOLERANCE_FLOOR))
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::lit(n as f64)
    }
}

impl Real for f64 {
    const TOLERANCE_FLOOR: f64 = 0.0;
}

impl Real for f32 {
    const TOLERANCE_FLOOR: f64 = 1e-5;
}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// Squared modulus `|z|²`.
#[inline]
pub(crate) fn abs2<T: Real>(z: C<T>) -> T {
    z.re * z.re + z.im * z.im
}

/// Pairwise (cascade) summation. The result does not depend on how the
/// caller chunked the work, only on the order of `values`.
pub fn pairwise_sum<T: Real>(values: &[T]) -> T {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().fold(T::zero(), |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_applies_to_single_precision() {
        assert_eq!(<f64 as Real>::tol(1e-12), 1e-12);
        assert_eq!(<f32 as Real>::tol(1e-12), 1e-5);
        assert_eq!(<f32 as Real>::tol(1e-2), 1e-2);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 500500.0);
        assert_eq!(pairwise_sum::<f64>(&[]), 0.0);
    }
}
