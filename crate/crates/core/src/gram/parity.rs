use crate::error::{Error, Result};
use crate::linalg::SignMatrix;

/// Every row and column has an even number of +1 entries.
pub fn is_parity_normalized(r: &SignMatrix) -> bool {
    let n = r.order();
    (0..n).all(|i| (0..n).filter(|&j| r.get(i, j) == 1).count() % 2 == 0)
        && (0..n).all(|j| (0..n).filter(|&i| r.get(i, j) == 1).count() % 2 == 0)
}

/// The unique matrix in the row/column negation class of `r` with every
/// row and column holding an even number of +1 entries.
pub fn parity_normalize(r: &SignMatrix) -> Result<SignMatrix> {
    let n = r.order();
    if n % 2 == 0 {
        return Err(Error::EvenOrder(n));
    }
    let mut out = r.clone();
    for i in 0..n {
        if (0..n).filter(|&j| out.get(i, j) == 1).count() % 2 == 1 {
            out.negate_row(i);
        }
    }
    // With an odd number of rows the columns needing a flip come in an even
    // number, so row parities survive.
    for j in 0..n {
        if (0..n).filter(|&i| out.get(i, j) == 1).count() % 2 == 1 {
            out.negate_col(j);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gram_cols, gram_rows};
    use num_traits::Signed;
    use proptest::prelude::*;

    fn sign_matrix(n: usize) -> impl Strategy<Value = SignMatrix> {
        proptest::collection::vec(prop::bool::ANY, n * n)
            .prop_map(move |b| SignMatrix::new(n, b.into_iter().map(|x| if x { 1 } else { -1 }).collect()).unwrap())
    }

    #[test]
    fn order_one() {
        let r = SignMatrix::new(1, vec![1]).unwrap();
        assert_eq!(parity_normalize(&r).unwrap(), SignMatrix::new(1, vec![-1]).unwrap());
        assert!(parity_normalize(&SignMatrix::new(2, vec![1; 4]).unwrap()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn normalization_properties(
            r in (1usize..=4).prop_flat_map(|k| sign_matrix(2 * k + 1)),
            flips in proptest::collection::vec(prop::bool::ANY, 18),
        ) {
            let n = r.order();
            let p = parity_normalize(&r).unwrap();
            prop_assert!(is_parity_normalized(&p));
            prop_assert_eq!(&parity_normalize(&p).unwrap(), &p);
            prop_assert_eq!(p.det().abs(), r.det().abs());
            // Any other member of the negation class normalizes identically.
            let mut q = r.clone();
            for (k, &f) in flips.iter().enumerate() {
                if f && k < n { q.negate_row(k); }
                if f && k >= 9 && k - 9 < n { q.negate_col(k - 9); }
            }
            prop_assert_eq!(parity_normalize(&q).unwrap(), p);
        }

        #[test]
        fn normalized_grams_congruent(r in sign_matrix(9)) {
            let p = parity_normalize(&r).unwrap();
            for g in [gram_rows(&p), gram_cols(&p)] {
                prop_assert!(g.entries().iter().all(|&v| (v - 1).rem_euclid(4) == 0));
            }
        }
    }
}
