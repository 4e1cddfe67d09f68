//! Lexicographic maximality under simultaneous index permutation.
//!
//! The staged construction fixes one index position at a time. At stage `k`
//! every surviving arrangement tries each remaining index in position `k`
//! and only the arrangements whose partial row `P_{k,k−1}` is maximal
//! survive. Two remaining indices whose rows agree outside the pair give the
//! same result up to a permutation of later positions, so only one of them
//! is tried.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

use super::{abs_lex_compare, block_ranges, components, matrix_compare};

/// A set of index permutations of a block; `perm[a]` is the original index
/// placed at position `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermSet {
    pub size: usize,
    pub perms: BTreeSet<Vec<usize>>,
}

impl PermSet {
    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn contains(&self, p: &[usize]) -> bool {
        self.perms.contains(p)
    }

    /// `compose(a, b)[i] = a[b[i]]`, so permuting by `a` then by `b` is
    /// permuting by `compose(a, b)`.
    pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
        b.iter().map(|&i| a[i]).collect()
    }

    pub fn inverse(a: &[usize]) -> Vec<usize> {
        let mut inv = vec![0; a.len()];
        for (i, &v) in a.iter().enumerate() {
            inv[v] = i;
        }
        inv
    }

    /// Identity present, closed under composition and inverse.
    pub fn is_group(&self) -> bool {
        let id: Vec<usize> = (0..self.size).collect();
        self.perms.contains(&id)
            && self.perms.iter().all(|a| self.perms.contains(&Self::inverse(a)))
            && self
                .perms
                .iter()
                .all(|a| self.perms.iter().all(|b| self.perms.contains(&Self::compose(a, b))))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Stop as soon as the identity arrangement falls behind.
    Check,
    /// Produce the maximal arrangement.
    Canonical,
    /// Keep every maximizing permutation, no pruning.
    All,
}

struct Arrangement {
    perm: Vec<usize>,
    mat: IntMatrix,
}

fn swapped(a: &Arrangement, k: usize, j: usize) -> Arrangement {
    let mut perm = a.perm.clone();
    perm.swap(k, j);
    let mut idx: Vec<usize> = (0..perm.len()).collect();
    idx.swap(k, j);
    Arrangement {
        perm,
        mat: a.mat.principal(&idx),
    }
}

/// Rows `a` and `b` agree at every position outside `{a, b}`, so swapping
/// the two indices leaves the matrix unchanged.
fn twins(m: &IntMatrix, a: usize, b: usize) -> bool {
    let (ra, rb) = (m.row(a), m.row(b));
    (0..ra.len()).all(|l| l == a || l == b || ra[l] == rb[l])
}

enum Outcome {
    Rejected,
    Done(Vec<Arrangement>),
}

fn staged(m: &IntMatrix, mode: Mode) -> Outcome {
    let p = m.order();
    let mut current = vec![Arrangement {
        perm: (0..p).collect(),
        mat: m.clone(),
    }];
    // Stage 0 has an empty partial row, so every index ties for position 0.
    for k in 0..p {
        let mut best: Option<Vec<i128>> = None;
        let mut picks: Vec<(usize, usize)> = Vec::new();
        for (ai, a) in current.iter().enumerate() {
            let mut tried: Vec<usize> = Vec::new();
            for j in k..p {
                if mode != Mode::All && tried.iter().any(|&t| twins(&a.mat, t, j)) {
                    continue;
                }
                tried.push(j);
                let cand = &a.mat.row(j)[..k];
                let ord = match &best {
                    None => Ordering::Greater,
                    Some(b) => abs_lex_compare(cand, b.as_slice()),
                };
                match ord {
                    Ordering::Greater => {
                        best = Some(cand.to_vec());
                        picks.clear();
                        picks.push((ai, j));
                    }
                    Ordering::Equal => picks.push((ai, j)),
                    Ordering::Less => {}
                }
            }
        }
        let best = best.expect("at least one candidate per stage");
        if mode == Mode::Check && abs_lex_compare(&m.row(k)[..k], best.as_slice()) == Ordering::Less {
            return Outcome::Rejected;
        }
        let mut next = Vec::with_capacity(picks.len());
        let mut seen: HashSet<Vec<i128>> = HashSet::new();
        for (ai, j) in picks {
            let arr = swapped(&current[ai], k, j);
            if mode == Mode::All || seen.insert(arr.mat.entries().to_vec()) {
                next.push(arr);
            }
        }
        current = next;
    }
    Outcome::Done(current)
}

/// True when no simultaneous permutation of the indices of `block` yields an
/// abs-lex greater matrix.
pub fn is_lex_max(block: &IntMatrix) -> bool {
    if block.order() <= 2 {
        return true;
    }
    matches!(staged(block, Mode::Check), Outcome::Done(_))
}

/// Maximal arrangement of `block` and a permutation producing it.
pub fn canonical_block(block: &IntMatrix) -> (IntMatrix, Vec<usize>) {
    match staged(block, Mode::Canonical) {
        Outcome::Done(mut v) => {
            let a = v.swap_remove(0);
            (a.mat, a.perm)
        }
        Outcome::Rejected => unreachable!("canonical mode never rejects"),
    }
}

/// Automorphism group of a lexicographically maximal block.
pub fn automorphism_group(block: &IntMatrix) -> Result<PermSet> {
    if !is_lex_max(block) {
        return Err(Error::NotLexMax);
    }
    match staged(block, Mode::All) {
        Outcome::Done(v) => Ok(PermSet {
            size: block.order(),
            perms: v.into_iter().map(|a| a.perm).collect(),
        }),
        Outcome::Rejected => unreachable!("collection mode never rejects"),
    }
}

/// A whole matrix is maximal iff it is in block form, every block is
/// maximal and blocks descend along the diagonal.
pub fn is_lex_max_matrix(m: &IntMatrix, n: usize) -> bool {
    let Ok(ranges) = block_ranges(m, n) else {
        return false;
    };
    let blocks: Vec<IntMatrix> = ranges
        .iter()
        .map(|r| m.principal(&r.clone().collect::<Vec<_>>()))
        .collect();
    blocks.iter().all(is_lex_max) && blocks.windows(2).all(|w| matrix_compare(&w[0], &w[1]).is_ge())
}

/// Canonical representative: the abs-lex maximal matrix equivalent to `m`
/// under simultaneous index permutation, with the permutation used.
pub fn lex_max_form(m: &IntMatrix, n: usize) -> (IntMatrix, Vec<usize>) {
    let mut blocks: Vec<(IntMatrix, Vec<usize>)> = components(m, n)
        .into_iter()
        .map(|comp| {
            let (cm, local) = canonical_block(&m.principal(&comp));
            let global = local.iter().map(|&i| comp[i]).collect();
            (cm, global)
        })
        .collect();
    blocks.sort_by(|a, b| matrix_compare(&b.0, &a.0));
    let perm: Vec<usize> = blocks.into_iter().flat_map(|b| b.1).collect();
    (m.principal(&perm), perm)
}

/// Exhaustive maximization over all `p!` permutations. Only for small `p`.
pub fn brute_force_lex_max(m: &IntMatrix) -> IntMatrix {
    let p = m.order();
    let mut perm: Vec<usize> = (0..p).collect();
    let mut best = m.clone();
    // Heap's algorithm.
    let mut c = vec![0usize; p];
    let mut i = 0;
    while i < p {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let cand = m.principal(&perm);
            if matrix_compare(&cand, &best) == Ordering::Greater {
                best = cand;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::{check_class, construct_ehlich_block, phi};
    use proptest::prelude::*;

    fn brute_force_stabilizer(m: &IntMatrix) -> BTreeSet<Vec<usize>> {
        let p = m.order();
        let mut out = BTreeSet::new();
        let mut perm: Vec<usize> = (0..p).collect();
        loop {
            if m.principal(&perm) == *m {
                out.insert(perm.clone());
            }
            // next lexicographic permutation
            let Some(i) = (1..p).rev().find(|&i| perm[i - 1] < perm[i]) else { break };
            let j = (i..p).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
            perm.swap(i - 1, j);
            perm[i..].reverse();
        }
        out
    }

    /// Random member of the class of order `p` for ambient `n`, found by
    /// rejection sampling.
    fn random_member(n: usize, p: usize, seed: &[u8]) -> Option<IntMatrix> {
        let vals = phi(n);
        let mut m = IntMatrix::zeros(p, p);
        let mut t = 0;
        for i in 0..p {
            m.set(i, i, n as i128);
            for j in 0..i {
                // Bias towards small magnitudes so PD matrices are common.
                let s = seed[t % seed.len()] as usize;
                t += 1;
                let idx = match s % 8 {
                    0..=3 => 0,
                    4..=5 => 1.min(vals.len() - 1),
                    6 => 2.min(vals.len() - 1),
                    _ => (s / 8) % vals.len(),
                };
                m.set(i, j, vals[idx] as i128);
                m.set(j, i, vals[idx] as i128);
            }
        }
        check_class(&m, n).ok().map(|_| m)
    }

    #[test]
    fn all_minimal_block() {
        let m = IntMatrix::from_fn(4, 4, |i, j| if i == j { 11 } else { -1 });
        assert!(is_lex_max(&m));
        let g = automorphism_group(&m).unwrap();
        assert_eq!(g.order(), 24);
        assert!(g.is_group());
    }

    #[test]
    fn two_by_two_group() {
        let m = IntMatrix::from_rows(&[vec![11i64, 3], vec![3, 11]]).unwrap();
        assert_eq!(automorphism_group(&m).unwrap().order(), 2);
    }

    #[test]
    fn ehlich_blocks_are_maximal() {
        let b = construct_ehlich_block(11, &[5, 2, 2, 2]).unwrap();
        assert!(b.is_lex_max());
        let first = b.matrix().leading(5);
        let g = automorphism_group(&first).unwrap();
        assert_eq!(g.perms, brute_force_stabilizer(&first));
        assert_eq!(g.order(), 120);
    }

    #[test]
    fn non_maximal_rejected_and_group_errors() {
        let m = IntMatrix::from_rows(&[
            vec![7i64, -1, -1],
            vec![-1, 7, 3],
            vec![-1, 3, 7],
        ])
        .unwrap();
        assert!(!is_lex_max(&m));
        assert!(matches!(automorphism_group(&m), Err(Error::NotLexMax)));
        let (c, perm) = canonical_block(&m);
        assert_eq!(c, brute_force_lex_max(&m));
        assert_eq!(m.principal(&perm), c);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(600))]
        #[test]
        fn staged_matches_brute_force(
            n in prop::sample::select(vec![9usize, 11, 13, 15]),
            p in 3usize..=7,
            seed in proptest::collection::vec(any::<u8>(), 21),
        ) {
            if let Some(m) = random_member(n, p, &seed) {
                let brute = brute_force_lex_max(&m);
                let (canon, perm) = canonical_block(&m);
                prop_assert_eq!(&canon, &brute);
                prop_assert_eq!(m.principal(&perm), canon.clone());
                prop_assert_eq!(is_lex_max(&m), matrix_compare(&m, &brute) == Ordering::Equal);
                prop_assert!(is_lex_max(&brute));
                // Whole-matrix criterion and canonical form.
                prop_assert_eq!(is_lex_max_matrix(&m, n), m == brute);
                prop_assert_eq!(lex_max_form(&m, n).0, brute.clone());
                let g = automorphism_group(&brute).unwrap();
                prop_assert!(g.is_group());
                prop_assert_eq!(g.perms, brute_force_stabilizer(&brute));
            }
        }
    }
}
