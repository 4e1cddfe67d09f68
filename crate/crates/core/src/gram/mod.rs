//! Candidate Gram matrices: the classes of symmetric positive definite
//! matrices with diagonal `n` and off-diagonal entries `≡ n (mod 4)`, their
//! abs-lex ordering, block structure and canonical forms.

mod construct;
mod lexmax;
mod parity;

use std::cmp::Ordering;
use std::ops::Range;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::linalg::{char_poly, det_exact, is_perfect_square, leading_minors, CharPoly, IntMatrix};

pub use construct::{construct_d, construct_ehlich_block, construct_j, construct_s, expand_counts};
pub use lexmax::{
    automorphism_group, brute_force_lex_max, canonical_block, is_lex_max, is_lex_max_matrix, lex_max_form, PermSet,
};
pub use parity::{is_parity_normalized, parity_normalize};

/// Off-diagonal values allowed in order `n`, ordered by magnitude:
/// `1, −3, 5, …` for `n ≡ 1` and `−1, 3, −5, …` for `n ≡ 3 (mod 4)`.
pub fn phi(n: usize) -> Vec<i64> {
    let n = n as i64;
    (1..n - 1)
        .step_by(2)
        .map(|m| if (m - n).rem_euclid(4) == 0 { m } else { -m })
        .collect()
}

/// The allowed value of smallest magnitude.
pub fn minimal_element(n: usize) -> i64 {
    if n % 4 == 1 {
        1
    } else {
        -1
    }
}

/// Lexicographic comparison by absolute value; a proper prefix is smaller.
pub fn abs_lex_compare<T: Copy + Into<i128>>(u: &[T], v: &[T]) -> Ordering {
    for (&a, &b) in u.iter().zip(v) {
        let (a, b): (i128, i128) = (a.into(), b.into());
        match a.abs().cmp(&b.abs()) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    u.len().cmp(&v.len())
}

/// The partial row `P_{i,k}`: the first `k` entries of row `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialRow {
    pub row: usize,
    pub values: Vec<i128>,
}

impl PartialRow {
    pub fn of(m: &IntMatrix, row: usize, k: usize) -> Self {
        PartialRow {
            row,
            values: m.row(row)[..k].to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Abs-lex order on square matrices: compare `P_{i,i−1}` for increasing `i`,
/// then the smaller order is less.
pub fn matrix_compare(a: &IntMatrix, b: &IntMatrix) -> Ordering {
    let p = a.order().min(b.order());
    for i in 1..p {
        match abs_lex_compare(&a.row(i)[..i], &b.row(i)[..i]) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.order().cmp(&b.order())
}

/// Connected components of the graph whose edges are the non-minimal
/// off-diagonal entries, each sorted, listed by smallest member.
pub fn components(m: &IntMatrix, n: usize) -> Vec<Vec<usize>> {
    let p = m.order();
    let min = minimal_element(n) as i128;
    let mut comp = vec![usize::MAX; p];
    let mut out = Vec::new();
    for s in 0..p {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut head = 0;
        while head < members.len() {
            let i = members[head];
            head += 1;
            for j in 0..p {
                if j != i && comp[j] == usize::MAX && m.get(i, j) != min {
                    comp[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Blocks as contiguous ranges; fails if some block is not contiguous.
pub fn block_ranges(m: &IntMatrix, n: usize) -> Result<Vec<Range<usize>>> {
    components(m, n)
        .into_iter()
        .map(|c| {
            let (lo, hi) = (c[0], c[c.len() - 1]);
            if hi - lo + 1 == c.len() {
                Ok(lo..hi + 1)
            } else {
                Err(Error::NotBlockForm)
            }
        })
        .collect()
}

/// Rows descend in abs-lex order, tested on the equivalent criterion
/// `P_{i,i−1} ≥ P_{i+1,i−1}` (non-strict, so equal rows are allowed).
pub fn is_lex_ordered(m: &IntMatrix) -> bool {
    // Full-row comparison is transitive, so adjacent pairs suffice.
    (1..m.order()).all(|i| abs_lex_compare(&m.row(i - 1)[..i - 1], &m.row(i)[..i - 1]).is_ge())
}

/// Checks membership in the class of order-`p` candidate Gram matrices for
/// ambient order `n` (without the determinant threshold).
pub fn check_class(m: &IntMatrix, n: usize) -> Result<()> {
    if n % 2 == 0 {
        return Err(Error::EvenOrder(n));
    }
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if m.order() > n {
        return Err(Error::NotInClass(format!("order {} exceeds n={n}", m.order())));
    }
    if !m.is_symmetric() {
        return Err(Error::NotInClass("not symmetric".into()));
    }
    let ni = n as i128;
    for i in 0..m.order() {
        if m.get(i, i) != ni {
            return Err(Error::NotInClass(format!("diagonal entry {} is not {n}", m.get(i, i))));
        }
        for j in 0..i {
            let v = m.get(i, j);
            if (v - ni).rem_euclid(4) != 0 || v.abs() >= ni {
                return Err(Error::NotInClass(format!("entry {v} at ({i},{j})")));
            }
        }
    }
    for (k, d) in leading_minors(m)?.iter().enumerate() {
        if d.sign() != num_bigint::Sign::Plus {
            return Err(Error::NotInClass(format!("leading minor of order {} is {d}", k + 1)));
        }
    }
    Ok(())
}

/// A validated member of the candidate class with cached invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateGram {
    n: usize,
    matrix: IntMatrix,
    det: BigInt,
    charpoly: CharPoly,
    components: Vec<Vec<usize>>,
}

impl CandidateGram {
    pub fn new(n: usize, matrix: IntMatrix) -> Result<Self> {
        check_class(&matrix, n)?;
        let det = det_exact(&matrix)?;
        let charpoly = char_poly(&matrix)?;
        let components = components(&matrix, n);
        Ok(CandidateGram {
            n,
            matrix,
            det,
            charpoly,
            components,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn sqrt_det(&self) -> Option<BigInt> {
        is_perfect_square(&self.det).expect("positive definite")
    }

    pub fn charpoly(&self) -> &CharPoly {
        &self.charpoly
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn block_ranges(&self) -> Result<Vec<Range<usize>>> {
        block_ranges(&self.matrix, self.n)
    }

    pub fn is_lex_ordered(&self) -> bool {
        is_lex_ordered(&self.matrix)
    }

    /// Lexicographically maximal: every block maximal and blocks descending.
    pub fn is_lex_max(&self) -> bool {
        is_lex_max_matrix(&self.matrix, self.n)
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.matrix
    }
}
