//! Determinant bounds used to prune partial Gram matrices.
//!
//! For a positive definite `M` of order `m` whose leading block `D_r` is
//! known, with off-diagonal magnitudes at least `c`,
//! `det M ≤ (n−c)^{m−r−1}[(n−c)·det D_r + (m−r)·max(0, d*)]` where `d*` is
//! the largest bordered determinant `det [[D_r, γ], [γᵀ, c]]` over the
//! admissible columns `γ`.

use num_bigint::BigInt;
use num_traits::{pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{det_exact, IntMatrix};

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn clamp0(d: &BigInt) -> BigInt {
    if d.is_positive() {
        d.clone()
    } else {
        BigInt::zero()
    }
}

/// `u_r(d*)` for a leading block of order `r` and determinant `det_dr`.
pub fn mk_bound(det_dr: &BigInt, r: usize, d_star: &BigInt, m: usize, n: usize, c: i64) -> Result<BigInt> {
    if c <= 0 || r > m || m > n || (r == m && m > 0) {
        return Err(Error::InvalidArgument(format!("mk_bound needs c>0 and r<m≤n (r={r}, m={m}, n={n})")));
    }
    let nc = big(n as i64 - c);
    Ok(pow(nc.clone(), m - r - 1) * (nc * det_dr + big((m - r) as i64) * clamp0(d_star)))
}

/// The `r = 0` case: `(n−c)^m + m·c·(n−c)^{m−1}`.
pub fn mk_bound_r0(m: usize, n: usize, c: i64) -> Result<BigInt> {
    if m == 0 || c <= 0 {
        return Err(Error::InvalidArgument("mk_bound_r0 needs m ≥ 1 and c > 0".into()));
    }
    let nc = big(n as i64 - c);
    Ok(pow(nc.clone(), m) + big(m as i64 * c) * pow(nc, m - 1))
}

/// Coefficient of `max(0, d*)` in the sharpened bound for `n ≡ 3 (mod 4)`:
/// `(n−1)^{n−r} − (n−3)^{n−r} − (n−r)(n−3)^{n−r−1}`.
pub fn mod4_3_coefficient(n: usize, r: usize) -> BigInt {
    assert!(r < n);
    let k = n - r;
    let (a, b) = (big(n as i64 - 1), big(n as i64 - 3));
    pow(a, k) - pow(b.clone(), k) - big(k as i64) * pow(b, k - 1)
}

/// Sharpened bound for `n ≡ 3 (mod 4)` and `m = n`:
/// `(n−1)^{n−r}·det D_r + coefficient·max(0, d*)`.
pub fn mk_bound_mod4_3(det_dr: &BigInt, d_star: &BigInt, n: usize, r: usize) -> Result<BigInt> {
    if n % 4 != 3 {
        return Err(Error::UnsupportedOrder {
            n,
            reason: "sharpened bound requires n = 3 mod 4".into(),
        });
    }
    if r == 0 || r >= n {
        return Err(Error::InvalidArgument(format!("need 0 < r < n (r={r})")));
    }
    Ok(pow(big(n as i64 - 1), n - r) * det_dr + mod4_3_coefficient(n, r) * clamp0(d_star))
}

/// The bound applied by the search for a full matrix of order `n` whose
/// leading block of order `r` has determinant `det_dr`.
pub fn search_bound(det_dr: &BigInt, d_star: &BigInt, n: usize, r: usize) -> Result<BigInt> {
    if n % 4 == 3 {
        mk_bound_mod4_3(det_dr, d_star, n, r)
    } else {
        mk_bound(det_dr, r, d_star, n, n, 1)
    }
}

/// `(P, C)` with the search bound equal to `P·det D_r + C·max(0, d*)`.
pub fn search_bound_coefficients(n: usize, r: usize) -> (BigInt, BigInt) {
    assert!(0 < r && r < n);
    let p = pow(big(n as i64 - 1), n - r);
    let c = if n % 4 == 3 {
        mod4_3_coefficient(n, r)
    } else {
        big((n - r) as i64) * pow(big(n as i64 - 1), n - r - 1)
    };
    (p, c)
}

/// `det [[D_r, γ], [γᵀ, c]]`.
pub fn bordered_det(d_r: &IntMatrix, gamma: &[i64], c: i64) -> Result<BigInt> {
    let r = d_r.order();
    if gamma.len() != r {
        return Err(Error::DimensionMismatch("bordering vector length".into()));
    }
    let m = IntMatrix::from_fn(r + 1, r + 1, |i, j| match (i < r, j < r) {
        (true, true) => d_r.get(i, j),
        (true, false) => gamma[i] as i128,
        (false, true) => gamma[j] as i128,
        (false, false) => c as i128,
    });
    det_exact(&m)
}

/// Reference implementation of the pruning test: scans `gammas` in order
/// and returns on the first bordered determinant whose bound reaches
/// `d_min²`.
pub fn step4_prune(m_r: &IntMatrix, gammas: &[Vec<i64>], n: usize, d_min: &BigInt) -> Result<(bool, Option<BigInt>)> {
    let r = m_r.order();
    let det = det_exact(m_r)?;
    let thr = d_min * d_min;
    for g in gammas {
        let d = bordered_det(m_r, g, 1)?;
        if search_bound(&det, &d, n, r)? >= thr {
            return Ok((true, Some(d)));
        }
    }
    Ok((false, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::phi;

    fn all_symmetric(n: usize, p: usize) -> Vec<IntMatrix> {
        let vals = phi(n);
        let pairs: Vec<(usize, usize)> = (0..p).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
        let total = vals.len().pow(pairs.len() as u32);
        (0..total)
            .map(|mut code| {
                let mut m = IntMatrix::from_fn(p, p, |i, j| if i == j { n as i128 } else { 0 });
                for &(i, j) in &pairs {
                    let v = vals[code % vals.len()] as i128;
                    code /= vals.len();
                    m.set(i, j, v);
                    m.set(j, i, v);
                }
                m
            })
            .collect()
    }

    fn max_pd_det(n: usize, p: usize) -> BigInt {
        all_symmetric(n, p)
            .iter()
            .filter(|m| crate::linalg::is_positive_definite(m).unwrap())
            .map(|m| det_exact(m).unwrap())
            .max()
            .unwrap()
    }

    #[test]
    fn r0_examples() {
        assert_eq!(mk_bound_r0(1, 9, 1).unwrap(), big(9));
        assert_eq!(mk_bound_r0(2, 5, 1).unwrap(), big(24));
        assert_eq!(mk_bound_r0(3, 7, 1).unwrap(), big(324));
        // Exhaustive oracles.
        assert_eq!(max_pd_det(5, 2), big(24));
        let m73 = max_pd_det(7, 3);
        assert_eq!(m73, big(8 * 8 * 5));
        assert!(m73 <= mk_bound_r0(3, 7, 1).unwrap());
    }

    #[test]
    fn general_form_special_cases() {
        let det = big(40);
        // r = m − 1 collapses to (n−c)·det + max(0,d*).
        assert_eq!(mk_bound(&det, 2, &big(7), 3, 9, 1).unwrap(), big(8 * 40 + 7));
        // Negative d* is ignored.
        assert_eq!(mk_bound(&det, 2, &big(-70), 5, 9, 1).unwrap(), mk_bound(&det, 2, &big(0), 5, 9, 1).unwrap());
        assert_eq!(mk_bound_mod4_3(&det, &big(-5), 11, 3).unwrap(), pow(big(10), 8) * big(40));
        assert!(mk_bound_mod4_3(&det, &big(1), 9, 3).is_err());
        // r = 0 with det D_0 = 1 reproduces the corollary.
        for (m, n) in [(2, 5), (3, 7), (5, 13)] {
            assert_eq!(mk_bound(&big(1), 0, &big(1), m, n, 1).unwrap(), mk_bound_r0(m, n, 1).unwrap());
        }
    }

    #[test]
    fn mod4_3_coefficient_matches_series() {
        for n in [7usize, 11, 15] {
            for r in 1..n {
                let k = n - r;
                let (a, b) = (big(n as i64 - 1), big(n as i64 - 3));
                let mut sum = BigInt::zero();
                for j in 0..k {
                    let tail = if j == 0 {
                        big(1)
                    } else {
                        pow(b.clone(), j) + big(2 * j as i64) * pow(b.clone(), j - 1)
                    };
                    sum += pow(a.clone(), k - 1 - j) * tail;
                }
                assert_eq!(mod4_3_coefficient(n, r), sum, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn sharpened_never_exceeds_general() {
        for n in [7usize, 11, 15, 19] {
            for r in 1..n {
                for (det, d) in [(big(1000), big(3)), (big(12), big(-4)), (big(5), big(500))] {
                    let a = mk_bound_mod4_3(&det, &d, n, r).unwrap();
                    let b = mk_bound(&det, r, &d, n, n, 1).unwrap();
                    assert!(a <= b, "n={n} r={r}");
                }
            }
        }
    }

    #[test]
    fn coefficients_agree_with_bounds() {
        for n in [9usize, 11, 13, 15] {
            for r in 1..n {
                let (p, c) = search_bound_coefficients(n, r);
                let det = big(777);
                let d = big(31);
                assert_eq!(search_bound(&det, &d, n, r).unwrap(), p * &det + c * &d);
            }
        }
    }

    #[test]
    fn n3_trace_keeps_the_root_pair() {
        let m2 = IntMatrix::from_rows(&[vec![3i64, -1], vec![-1, 3]]).unwrap();
        let gammas = vec![vec![-1i64, -1]];
        let (keep, d) = step4_prune(&m2, &gammas, 3, &big(4)).unwrap();
        assert!(keep);
        assert_eq!(d, Some(big(0)));
        let (keep, _) = step4_prune(&m2, &gammas, 3, &big(5)).unwrap();
        assert!(!keep);
    }
}
