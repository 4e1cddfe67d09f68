//! Slow reference enumeration used to check the search. It shares no code
//! with the search engine beyond the exact linear algebra and the
//! brute-force maximal form.

use num_bigint::BigInt;

use crate::gram::{abs_lex_compare, brute_force_lex_max, matrix_compare, phi};
use crate::linalg::{det_exact, is_perfect_square, leading_minors, IntMatrix};

/// Row-by-row enumeration of every lex-ordered positive definite matrix,
/// filtered to perfect squares above the threshold that equal their own
/// brute-force maximal form.
pub fn reference_search(n: usize, d_min: &BigInt) -> Vec<(IntMatrix, BigInt)> {
    fn rec(m: &mut IntMatrix, i: usize, j: usize, n: usize, thr: &BigInt, out: &mut Vec<(IntMatrix, BigInt)>) {
        if i == n {
            let d = det_exact(m).unwrap();
            if d >= *thr && is_perfect_square(&d).unwrap().is_some() && brute_force_lex_max(m) == *m {
                out.push((m.clone(), d));
            }
            return;
        }
        if j == i {
            if i >= 2 && abs_lex_compare_rows(m, i) {
                return;
            }
            let lead = m.leading(i + 1);
            let d = leading_minors(&lead).unwrap().pop().unwrap();
            let fischer = &d * num_traits::pow(BigInt::from(n), n - i - 1);
            if d.sign() != num_bigint::Sign::Plus || fischer < *thr {
                return;
            }
            rec(m, i + 1, 0, n, thr, out);
            return;
        }
        for v in phi(n) {
            m.set(i, j, v as i128);
            m.set(j, i, v as i128);
            rec(m, i, j + 1, n, thr, out);
        }
    }
    fn abs_lex_compare_rows(m: &IntMatrix, i: usize) -> bool {
        abs_lex_compare(&m.row(i - 1)[..i - 1], &m.row(i)[..i - 1]).is_lt()
    }
    let mut m = IntMatrix::from_fn(n, n, |i, j| if i == j { n as i128 } else { 0 });
    let mut out = Vec::new();
    rec(&mut m, 0, 0, n, &(d_min * d_min), &mut out);
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| matrix_compare(&b.0, &a.0)));
    out
}
