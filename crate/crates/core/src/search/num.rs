//! Integer types the search can run on. Products of two values are formed
//! in a wider type so that `i128` suffices for every stored quantity up to
//! order 21 or so; larger orders use `BigInt` throughout.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use ethnum::I256;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub trait Wide:
    Clone
    + Ord
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Rem<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_big(v: &BigInt) -> Self;
}

impl Wide for I256 {
    fn zero() -> Self {
        I256::ZERO
    }
    fn from_big(v: &BigInt) -> Self {
        let (sign, bytes) = v.to_bytes_le();
        assert!(bytes.len() <= 31, "value too large for 256-bit arithmetic");
        let mut buf = [0u8; 32];
        buf[..bytes.len()].copy_from_slice(&bytes);
        let mag = I256::from_le_bytes(buf);
        if sign == num_bigint::Sign::Minus {
            -mag
        } else {
            mag
        }
    }
}

impl Wide for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn from_big(v: &BigInt) -> Self {
        v.clone()
    }
}

pub trait SearchInt: Clone + Debug + Ord + Send + Sync + 'static {
    type W: Wide;

    fn from_i64(v: i64) -> Self;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn is_positive(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul_small(&self, k: i64) -> Self;
    fn abs(&self) -> Self;
    fn widen(&self) -> Self::W;
    fn wmul(&self, o: &Self) -> Self::W;
    fn narrow(w: &Self::W) -> Self;
}

impl SearchInt for i128 {
    type W = I256;

    #[inline]
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    #[inline]
    fn is_positive(&self) -> bool {
        *self > 0
    }
    #[inline]
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    #[inline]
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    #[inline]
    fn mul_small(&self, k: i64) -> Self {
        self * k as i128
    }
    #[inline]
    fn abs(&self) -> Self {
        i128::abs(*self)
    }
    #[inline]
    fn widen(&self) -> I256 {
        I256::from(*self)
    }
    #[inline]
    fn wmul(&self, o: &Self) -> I256 {
        I256::from(*self) * I256::from(*o)
    }
    #[inline]
    fn narrow(w: &I256) -> Self {
        i128::try_from(*w).expect("value exceeds i128")
    }
}

impl SearchInt for BigInt {
    type W = BigInt;

    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_small(&self, k: i64) -> Self {
        self * k
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn widen(&self) -> BigInt {
        self.clone()
    }
    fn wmul(&self, o: &Self) -> BigInt {
        self * o
    }
    fn narrow(w: &BigInt) -> Self {
        w.clone()
    }
}

/// True when every quantity the engine forms at order `n` with threshold
/// `thr = d_min²` fits `i128`, with products fitting 256 bits.
///
/// Adjugate entries of a positive definite matrix with diagonal `n` are at
/// most `n^{r−1}` in magnitude, so the largest single-width value is the
/// bilinear term `r²(n−2)²n^{r−1}` plus a shifted determinant
/// `(n−2)·n^{r}`, with `r ≤ n−1`.
pub fn fits_i128(n: usize, thr: &BigInt) -> bool {
    if n < 3 {
        return true;
    }
    let nb = BigInt::from(n);
    let r = n - 1;
    let bil = BigInt::from(r * r * (n - 2) * (n - 2)) * num_traits::pow(nb.clone(), r - 1);
    let shift = BigInt::from(n - 2) * num_traits::pow(nb.clone(), r);
    let limit = BigInt::from(1) << 124u32;
    bil + shift < limit && *thr < limit && num_traits::pow(nb, n) < limit
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i256_from_big_roundtrip() {
        for v in [0i128, 1, -1, i128::MAX, i128::MIN + 1, 123456789012345678901234567890] {
            assert_eq!(<I256 as Wide>::from_big(&BigInt::from(v)), I256::from(v));
        }
        let big = BigInt::from(i128::MAX) * BigInt::from(1000);
        let w = <I256 as Wide>::from_big(&big);
        assert_eq!(w / I256::from(1000), I256::from(i128::MAX));
        assert_eq!(<I256 as Wide>::from_big(&-big.clone()), -w);
    }

    #[test]
    fn i128_range() {
        assert!(fits_i128(21, &BigInt::from(1u64 << 60)));
        assert!(fits_i128(15, &BigInt::from(1u64 << 60)));
        assert!(!fits_i128(29, &BigInt::from(1u64 << 60)));
    }
}
