//! Classical upper bounds on the maximal determinant of a ±1 matrix.
//!
//! Every bound is held as its exact square so that comparisons against
//! `d_min²` never involve irrational numbers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// An upper bound `B` on `det R`, stored as `B²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundValue {
    pub squared_value: BigRational,
    /// `⌊B⌋`.
    pub floor_value: BigInt,
    /// True when `B` itself is an integer.
    pub is_integral: bool,
}

impl BoundValue {
    pub fn from_squared(squared_value: BigRational) -> Self {
        assert!(!squared_value.is_negative());
        // ⌊√(p/q)⌋ = ⌊√⌊p/q⌋⌋.
        let floor_value = squared_value.floor().to_integer().sqrt();
        let is_integral = squared_value.is_integer()
            && &floor_value * &floor_value == squared_value.to_integer();
        BoundValue {
            squared_value,
            floor_value,
            is_integral,
        }
    }

    fn from_integer_value(v: BigInt) -> Self {
        Self::from_squared(BigRational::from_integer(&v * &v))
    }

    /// True when `det` (a nonnegative integer) does not exceed the bound.
    pub fn admits(&self, det: &BigInt) -> bool {
        BigRational::from_integer(det * det) <= self.squared_value
    }
}

fn pow(b: i64, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(b), e)
}

/// `det R ≤ n^{n/2}`.
pub fn hadamard_bound(n: usize) -> Result<BoundValue> {
    if n == 0 {
        return Err(Error::InvalidArgument("order must be positive".into()));
    }
    Ok(BoundValue::from_squared(BigRational::from_integer(pow(n as i64, n))))
}

/// Odd orders: `det R ≤ √(2n−1)·(n−1)^{(n−1)/2}`.
pub fn barba_bound(n: usize) -> Result<BoundValue> {
    if n % 2 == 0 {
        return Err(Error::EvenOrder(n));
    }
    let sq = BigInt::from(2 * n as i64 - 1) * pow(n as i64 - 1, n - 1);
    Ok(BoundValue::from_squared(BigRational::from_integer(sq)))
}

/// `n ≡ 2 (mod 4)`: `det R ≤ 2(n−1)(n−2)^{(n−2)/2}`.
pub fn ehlich_wojtas_bound(n: usize) -> Result<BoundValue> {
    if n % 4 != 2 {
        return Err(Error::UnsupportedOrder {
            n,
            reason: "bound requires n = 2 mod 4".into(),
        });
    }
    let v = BigInt::from(2 * (n as i64 - 1)) * pow(n as i64 - 2, (n - 2) / 2);
    Ok(BoundValue::from_integer_value(v))
}

/// Squared bound for `n ≡ 3 (mod 4)` with an explicit block count `s`.
pub fn ehlich_mod4_3_with_s(n: usize, s: usize) -> Result<BoundValue> {
    if n % 4 != 3 {
        return Err(Error::UnsupportedOrder {
            n,
            reason: "bound requires n = 3 mod 4".into(),
        });
    }
    if s == 0 || s > n {
        return Err(Error::InvalidArgument(format!("block count s={s} out of range")));
    }
    let r = n / s;
    let v = n - r * s;
    let u = s - v;
    let (ni, ri) = (n as i64, r as i64);
    let a = ni - 3 + 4 * ri;
    let b = ni + 1 + 4 * ri;
    let prefix = pow(ni - 3, n - s) * pow(a, u) * pow(b, v);
    let one = BigRational::one();
    let factor = one
        - BigRational::new(BigInt::from(u as i64 * ri), BigInt::from(a))
        - BigRational::new(BigInt::from(v as i64 * (ri + 1)), BigInt::from(b));
    if factor <= BigRational::zero() {
        return Err(Error::InvalidArgument(format!("s={s} gives a nonpositive radicand at n={n}")));
    }
    Ok(BoundValue::from_squared(BigRational::from_integer(prefix) * factor))
}

/// The block counts allowed for order `n`.
pub fn ehlich_s_schedule(n: usize) -> Result<Vec<usize>> {
    match n {
        7 => Ok(vec![5]),
        11 => Ok(vec![5, 6]),
        15..=59 => Ok(vec![6]),
        _ if n >= 63 => Ok(vec![7]),
        _ => Err(Error::UnsupportedOrder {
            n,
            reason: "no block count defined for this order".into(),
        }),
    }
}

/// `n ≡ 3 (mod 4)`, `n ≥ 7`. Where several block counts are allowed the
/// smallest resulting bound is returned.
pub fn ehlich_mod4_3_bound(n: usize) -> Result<BoundValue> {
    if n % 4 != 3 {
        return Err(Error::UnsupportedOrder {
            n,
            reason: "bound requires n = 3 mod 4".into(),
        });
    }
    ehlich_s_schedule(n)?
        .into_iter()
        .map(|s| ehlich_mod4_3_with_s(n, s))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min_by(|a, b| a.squared_value.cmp(&b.squared_value))
        .ok_or_else(|| Error::InvalidArgument("empty schedule".into()))
}

/// The tightest applicable bound for order `n`.
pub fn best_bound(n: usize) -> Result<BoundValue> {
    match n % 4 {
        0 => hadamard_bound(n),
        2 => ehlich_wojtas_bound(n),
        3 if n >= 7 => ehlich_mod4_3_bound(n),
        _ => barba_bound(n),
    }
}

/// True when `n = k² + (k+1)²` for some `k ≥ 0`.
pub fn is_sum_of_consecutive_squares(n: usize) -> bool {
    (0..).map(|k: usize| k * k + (k + 1) * (k + 1)).take_while(|&v| v <= n).any(|v| v == n)
}

/// One line of the `bounds` report.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub squared_value: String,
    pub floor_value: String,
    pub is_integral: bool,
}

/// All bounds that apply to order `n`.
pub fn applicable_bounds(n: usize) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let mut push = |name: &str, b: BoundValue| {
        out.push(BoundReport {
            name: name.to_string(),
            squared_value: b.squared_value.to_string(),
            floor_value: b.floor_value.to_string(),
            is_integral: b.is_integral,
        })
    };
    push("hadamard", hadamard_bound(n)?);
    if n % 2 == 1 {
        push("barba", barba_bound(n)?);
    }
    if n % 4 == 2 {
        push("ehlich_wojtas", ehlich_wojtas_bound(n)?);
    }
    if n % 4 == 3 && n >= 7 {
        for s in ehlich_s_schedule(n)? {
            push(&format!("ehlich_mod4_3_s{s}"), ehlich_mod4_3_with_s(n, s)?);
        }
    }
    Ok(out)
}

/// Known maximal determinants divided by `2^{n−1}`, for `1 ≤ n ≤ 18`.
pub const KNOWN_MDN: [u64; 18] = [
    1, 1, 1, 2, 3, 5, 9, 32, 56, 144, 320, 1458, 3645, 9477, 25515, 131072, 327680, 1114112,
];

/// Known maximal determinant for the orders where it has been settled.
pub fn known_max_det(n: usize) -> Option<BigInt> {
    let mdn = match n {
        1..=18 => BigInt::from(KNOWN_MDN[n - 1]),
        21 => BigInt::from(29) * pow(5, 9),
        _ => return None,
    };
    Some(mdn * pow(2, n - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn hadamard_small() {
        assert_eq!(hadamard_bound(4).unwrap().floor_value, big(16));
        assert_eq!(hadamard_bound(1).unwrap().floor_value, big(1));
        let two = hadamard_bound(2).unwrap();
        assert_eq!(two.floor_value, big(2));
        assert!(two.is_integral);
    }

    #[test]
    fn barba_examples() {
        let b13 = barba_bound(13).unwrap();
        assert!(b13.is_integral);
        assert_eq!(b13.floor_value, big(3645 << 12));
        let b5 = barba_bound(5).unwrap();
        assert_eq!(b5.floor_value, big(48));
        assert!(!barba_bound(15).unwrap().is_integral);
        assert!(matches!(barba_bound(4), Err(Error::EvenOrder(4))));
    }

    #[test]
    fn ehlich_wojtas_examples() {
        assert_eq!(ehlich_wojtas_bound(6).unwrap().floor_value, big(160));
        assert_eq!(ehlich_wojtas_bound(10).unwrap().floor_value, big(73728));
        assert_eq!(ehlich_wojtas_bound(2).unwrap().floor_value, big(2));
        assert!(ehlich_wojtas_bound(7).is_err());
    }

    #[test]
    fn mod4_3_examples() {
        let b7 = ehlich_mod4_3_bound(7).unwrap();
        assert!(!b7.is_integral);
        // s=5, r=1, v=2, u=3: 4² · 8³ · 12² · (1 − 3/8 − 4/12) = 344064.
        assert_eq!(b7.squared_value, BigRational::from_integer(big(344064)));
        assert_eq!(b7.floor_value, big(586));
        assert!(b7.floor_value >= big(576));

        let b15 = ehlich_mod4_3_bound(15).unwrap();
        assert!(b15.floor_value >= big(25515 << 14));

        let b11 = ehlich_mod4_3_bound(11).unwrap();
        let s5 = ehlich_mod4_3_with_s(11, 5).unwrap();
        let s6 = ehlich_mod4_3_with_s(11, 6).unwrap();
        assert_eq!(b11.squared_value, s5.squared_value.clone().min(s6.squared_value.clone()));
        assert!(b11.floor_value >= big(320 << 10));

        assert!(ehlich_mod4_3_bound(3).is_err());
        assert!(ehlich_mod4_3_bound(9).is_err());
    }

    #[test]
    fn floor_invariant() {
        for n in 1..=40 {
            for b in [hadamard_bound(n).ok(), barba_bound(n).ok(), best_bound(n).ok()].into_iter().flatten() {
                let f = BigRational::from_integer(b.floor_value.clone());
                let f1 = BigRational::from_integer(&b.floor_value + 1);
                assert!(&f * &f <= b.squared_value);
                assert!(b.squared_value < &f1 * &f1);
            }
        }
    }

    #[test]
    fn bounds_dominate_known_values() {
        for n in (3..=21).step_by(2) {
            let b = best_bound(n).unwrap();
            if let Some(md) = known_max_det(n) {
                assert!(b.floor_value >= md, "n={n}");
                assert!(b.admits(&md));
            }
        }
        for n in 1..=18 {
            assert!(best_bound(n).unwrap().floor_value >= known_max_det(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn barba_integrality_matches_consecutive_squares() {
        for n in (1..=201).step_by(2) {
            assert_eq!(barba_bound(n).unwrap().is_integral, is_sum_of_consecutive_squares(n), "n={n}");
        }
    }

    #[test]
    fn mod4_3_not_integral_up_to_59() {
        for n in (7..=59).step_by(4) {
            assert!(!ehlich_mod4_3_bound(n).unwrap().is_integral, "n={n}");
        }
    }
}
