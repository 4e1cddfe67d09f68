use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

use super::CandidateGram;

/// All-ones `p × q` matrix.
pub fn construct_j(p: usize, q: usize) -> IntMatrix {
    IntMatrix::from_fn(p, q, |_, _| 1)
}

/// Expands run-length pairs `(value, count)` such as `5, 1₇` into a vector.
pub fn expand_counts(runs: &[(i64, usize)]) -> Vec<i64> {
    runs.iter().flat_map(|&(v, k)| std::iter::repeat(v).take(k)).collect()
}

fn tail_entry(n: usize, i: usize, j: usize) -> i128 {
    if i == j {
        n as i128
    } else {
        1
    }
}

/// `S(v) = [[n, vᵀ], [v, (n−1)I + J]]` with `v` of length `n−1`.
pub fn construct_s(n: usize, v: &[i64]) -> Result<CandidateGram> {
    if v.len() + 1 != n {
        return Err(Error::DimensionMismatch(format!("S(v) needs {} entries, got {}", n - 1, v.len())));
    }
    let m = IntMatrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => n as i128,
        (0, j) => v[j - 1] as i128,
        (i, 0) => v[i - 1] as i128,
        (i, j) => tail_entry(n, i, j),
    });
    CandidateGram::new(n, m)
}

/// `D(a; v; w)` with `v`, `w` of length `n−2`.
pub fn construct_d(n: usize, a: i64, v: &[i64], w: &[i64]) -> Result<CandidateGram> {
    if v.len() + 2 != n || w.len() + 2 != n {
        return Err(Error::DimensionMismatch(format!(
            "D(a;v;w) needs vectors of length {}, got {} and {}",
            n - 2,
            v.len(),
            w.len()
        )));
    }
    let m = IntMatrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) | (1, 1) => n as i128,
        (0, 1) | (1, 0) => a as i128,
        (0, j) => v[j - 2] as i128,
        (j, 0) => v[j - 2] as i128,
        (1, j) => w[j - 2] as i128,
        (j, 1) => w[j - 2] as i128,
        (i, j) => tail_entry(n, i, j),
    });
    CandidateGram::new(n, m)
}

/// Ehlich block matrix `B(v₁, …, v_k) = (n−3)I − J + 4·diag(J_{v₁}, …)`,
/// for `n ≡ 3 (mod 4)` and `Σ vᵢ = n`.
pub fn construct_ehlich_block(n: usize, sizes: &[usize]) -> Result<CandidateGram> {
    if sizes.iter().sum::<usize>() != n || sizes.iter().any(|&s| s == 0) {
        return Err(Error::DimensionMismatch(format!("block sizes {sizes:?} do not sum to {n}")));
    }
    if n % 4 != 3 {
        return Err(Error::UnsupportedOrder {
            n,
            reason: "Ehlich block matrices need n = 3 mod 4".into(),
        });
    }
    let mut label = Vec::with_capacity(n);
    for (b, &s) in sizes.iter().enumerate() {
        label.extend(std::iter::repeat(b).take(s));
    }
    let m = IntMatrix::from_fn(n, n, |i, j| {
        if i == j {
            n as i128
        } else if label[i] == label[j] {
            3
        } else {
            -1
        }
    });
    CandidateGram::new(n, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn normalized_sqrt(g: &CandidateGram) -> BigInt {
        let r = g.sqrt_det().expect("square determinant");
        let p = BigInt::from(1) << (g.n() - 1);
        assert_eq!(&r % &p, BigInt::from(0));
        r / p
    }

    #[test]
    fn b_one_three() {
        let b = construct_ehlich_block(3, &[1, 1, 1]).unwrap();
        let expect = IntMatrix::from_rows(&[vec![3i64, -1, -1], vec![-1, 3, -1], vec![-1, -1, 3]]).unwrap();
        assert_eq!(b.matrix(), &expect);
        assert_eq!(normalized_sqrt(&b), BigInt::from(1));
    }

    #[test]
    fn s_and_d_examples() {
        let s = construct_s(9, &expand_counts(&[(5, 1), (1, 7)])).unwrap();
        assert_eq!(normalized_sqrt(&s), BigInt::from(56));
        let d = construct_d(
            17,
            1,
            &expand_counts(&[(5, 1), (-3, 1), (1, 13)]),
            &expand_counts(&[(1, 1), (-3, 3), (1, 11)]),
        )
        .unwrap();
        assert_eq!(normalized_sqrt(&d), BigInt::from(81 * 4096));
    }

    #[test]
    fn ehlich_fifteen() {
        let b = construct_ehlich_block(15, &[4, 4, 4, 3]).unwrap();
        assert_eq!(normalized_sqrt(&b), BigInt::from(25515));
        let b = construct_ehlich_block(15, &[6, 3, 2, 2, 2]).unwrap();
        assert_eq!(normalized_sqrt(&b), BigInt::from(25515));
    }

    #[test]
    fn dimension_errors() {
        assert!(construct_s(9, &[1; 7]).is_err());
        assert!(construct_d(9, 1, &[1; 7], &[1; 6]).is_err());
        assert!(construct_ehlich_block(7, &[3, 3]).is_err());
        assert_eq!(construct_j(2, 3).entries(), &[1; 6]);
    }
}
