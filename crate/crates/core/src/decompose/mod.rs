//! Decomposition of candidate Gram matrix pairs: find `R` with entries ±1,
//! `RRᵀ = M_r` and `RᵀR` equal to `M_c` up to an index permutation, or
//! prove that none exists.

mod cells;
mod equiv;
mod fill;
mod signature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::CandidateGram;
use crate::linalg::{gram_cols, gram_rows, SignMatrix};

pub use cells::CellStructure;
pub use equiv::{find_isomorphism, permutation_equivalent};
pub use signature::{
    collapse_orbits, entry_mask, inner_product_range, pair_compatible, signature_solutions, BlockSignature,
    Domains, Elimination, Reason, Side, SideDomains,
};

/// A pair with equal characteristic polynomials.
#[derive(Clone, Debug)]
pub struct DecompositionProblem {
    m_r: CandidateGram,
    m_c: CandidateGram,
}

impl DecompositionProblem {
    pub fn new(m_r: CandidateGram, m_c: CandidateGram) -> Result<Self> {
        if m_r.order() != m_c.order() {
            return Err(Error::DimensionMismatch("pair members differ in order".into()));
        }
        if m_r.charpoly() != m_c.charpoly() {
            return Err(Error::InvalidArgument("pair members have different characteristic polynomials".into()));
        }
        Ok(DecompositionProblem { m_r, m_c })
    }

    pub fn m_r(&self) -> &CandidateGram {
        &self.m_r
    }

    pub fn m_c(&self) -> &CandidateGram {
        &self.m_c
    }
}

/// Index pairs `(i, j)`, `i ≤ j`, of candidates sharing a characteristic
/// polynomial, diagonal pairs included.
pub fn pair_by_charpoly(candidates: &[CandidateGram]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..candidates.len() {
        for j in i..candidates.len() {
            if candidates[i].order() == candidates[j].order() && candidates[i].charpoly() == candidates[j].charpoly() {
                out.push((i, j));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Witness,
    None,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Witness => "witness",
            Verdict::None => "none",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// The stage that settled a problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Some row or column cell has no solution of its diagonal equation.
    DiagonalEquations,
    /// The pair and entry filters emptied some cell.
    SignatureFilters,
    /// No joint assignment of signatures to all rows and columns exists.
    SignatureAssignment,
    /// Signature assignments exist but none completes to a ±1 matrix.
    EntryFill,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub stage: Stage,
    /// Solutions of the diagonal equations per row cell and column cell.
    pub row_solutions: Vec<usize>,
    pub column_solutions: Vec<usize>,
    /// Survivors of the filters per cell.
    pub row_survivors: Vec<usize>,
    pub column_survivors: Vec<usize>,
    pub eliminations: Vec<Elimination>,
    /// Every recorded elimination re-checked against the signatures alive
    /// when it was made.
    pub eliminations_confirmed: bool,
    pub assignments: u64,
    pub nodes: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub verdict: Verdict,
    /// One representative per equivalence class.
    pub witnesses: Vec<SignMatrix>,
    pub class_count: usize,
    /// Witnesses found before quotienting by equivalence.
    pub raw_witnesses: usize,
    /// False when the witness limit or node budget cut the enumeration
    /// short; `class_count` is then a lower bound.
    pub complete: bool,
    pub certificate: Certificate,
}

#[derive(Clone, Debug)]
pub struct DecomposeConfig {
    pub node_budget: u64,
    /// Stop after this many raw witnesses (the class count is then a lower
    /// bound).
    pub max_witnesses: usize,
}

impl DecomposeConfig {
    /// Stops at the first witness; enough to settle existence.
    pub fn existence() -> Self {
        DecomposeConfig {
            max_witnesses: 1,
            ..Default::default()
        }
    }
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            node_budget: 1_000_000_000,
            max_witnesses: 100_000,
        }
    }
}

fn counts(d: &SideDomains, alive: bool) -> Vec<usize> {
    (0..d.own.len())
        .map(|p| if alive { d.alive_count(p) } else { d.sigs[p].len() })
        .collect()
}

/// Decides the problem: signatures, filters, signature assignment, and the
/// entry-level search, in that order.
pub fn full_decompose(problem: &DecompositionProblem, cfg: &DecomposeConfig) -> Result<DecompositionResult> {
    let mut d = Domains::new(problem.m_r.matrix(), problem.m_c.matrix())?;
    let row_solutions = counts(&d.rows, false);
    let column_solutions = counts(&d.cols, false);
    let mut cert = Certificate {
        stage: Stage::DiagonalEquations,
        row_solutions,
        column_solutions,
        row_survivors: Vec::new(),
        column_survivors: Vec::new(),
        eliminations: Vec::new(),
        eliminations_confirmed: true,
        assignments: 0,
        nodes: 0,
    };
    let none = |cert: Certificate| DecompositionResult {
        verdict: Verdict::None,
        witnesses: Vec::new(),
        class_count: 0,
        raw_witnesses: 0,
        complete: true,
        certificate: cert,
    };
    if d.is_wiped_out() {
        cert.row_survivors = cert.row_solutions.clone();
        cert.column_survivors = cert.column_solutions.clone();
        return Ok(none(cert));
    }

    d.filter_to_fixpoint();
    cert.row_survivors = counts(&d.rows, true);
    cert.column_survivors = counts(&d.cols, true);
    cert.eliminations = d.log.clone();
    cert.eliminations_confirmed = d.confirm_log();
    if d.is_wiped_out() {
        cert.stage = Stage::SignatureFilters;
        return Ok(none(cert));
    }

    let mut search = fill::Search::new(&d, cfg.node_budget, cfg.max_witnesses);
    search.run();
    cert.assignments = search.stats.assignments;
    cert.nodes = search.stats.nodes;
    cert.stage = if search.stats.assignments == 0 {
        Stage::SignatureAssignment
    } else {
        Stage::EntryFill
    };
    let raw = std::mem::take(&mut search.witnesses);
    if raw.is_empty() {
        return Ok(DecompositionResult {
            verdict: if search.stats.exhausted {
                Verdict::Inconclusive
            } else {
                Verdict::None
            },
            witnesses: Vec::new(),
            class_count: 0,
            raw_witnesses: 0,
            complete: !search.stats.exhausted,
            certificate: cert,
        });
    }
    let complete = !search.stats.exhausted && raw.len() < cfg.max_witnesses;
    let reps = class_representatives(&raw);
    Ok(DecompositionResult {
        verdict: Verdict::Witness,
        complete,
        class_count: reps.len(),
        raw_witnesses: raw.len(),
        witnesses: reps,
        certificate: cert,
    })
}

/// `RRᵀ = M_r` exactly and `RᵀR` equal to `M_c` after some index
/// permutation.
pub fn verify_witness(r: &SignMatrix, problem: &DecompositionProblem) -> bool {
    r.order() == problem.m_r.order()
        && gram_rows(r) == *problem.m_r.matrix()
        && find_isomorphism(&gram_cols(r), problem.m_c.matrix()).is_some()
}

/// First witness of each class under row and column permutations.
pub fn class_representatives(witnesses: &[SignMatrix]) -> Vec<SignMatrix> {
    let mut reps: Vec<SignMatrix> = Vec::new();
    for w in witnesses {
        if !reps.iter().any(|r| permutation_equivalent(r, w)) {
            reps.push(w.clone());
        }
    }
    reps
}

/// Number of classes among verified witnesses. Row and column permutations
/// carrying one witness to another automatically preserve both Gram
/// matrices; witnesses are parity normalized, which fixes the global sign.
pub fn count_classes(witnesses: &[SignMatrix]) -> usize {
    class_representatives(witnesses).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::{construct_ehlich_block, construct_s, expand_counts};

    fn solve(m: CandidateGram) -> DecompositionResult {
        let p = DecompositionProblem::new(m.clone(), m).unwrap();
        full_decompose(&p, &DecomposeConfig::default()).unwrap()
    }

    #[test]
    fn small_orders_decompose() {
        for sizes in [vec![1usize, 1, 1], vec![2, 2, 2, 1]] {
            let n = sizes.iter().sum();
            let r = solve(construct_ehlich_block(n, &sizes).unwrap());
            assert_eq!(r.verdict, Verdict::Witness, "{sizes:?}");
            let p = DecompositionProblem::new(
                construct_ehlich_block(n, &sizes).unwrap(),
                construct_ehlich_block(n, &sizes).unwrap(),
            )
            .unwrap();
            assert!(r.witnesses.iter().all(|w| verify_witness(w, &p)));
        }
        let s = construct_s(9, &expand_counts(&[(5, 1), (1, 7)])).unwrap();
        assert_eq!(solve(s).verdict, Verdict::Witness);
    }

    #[test]
    fn order_fifteen_verdicts() {
        let r = solve(construct_ehlich_block(15, &[4, 4, 4, 3]).unwrap());
        assert_eq!(r.verdict, Verdict::Witness);
        assert_eq!(r.class_count, 1);
        for sizes in [vec![6usize, 3, 2, 2, 2], vec![3, 3, 3, 3, 3], vec![3, 3, 3, 3, 2, 1]] {
            let r = solve(construct_ehlich_block(15, &sizes).unwrap());
            assert_eq!(r.verdict, Verdict::None, "{sizes:?}");
            assert!(r.certificate.eliminations_confirmed);
        }
    }

    #[test]
    fn pairs_need_equal_charpolys() {
        let a = construct_ehlich_block(15, &[4, 4, 4, 3]).unwrap();
        let b = construct_ehlich_block(15, &[3, 3, 3, 3, 3]).unwrap();
        assert!(DecompositionProblem::new(a.clone(), b.clone()).is_err());
        assert_eq!(pair_by_charpoly(&[a, b]), vec![(0, 0), (1, 1)]);
        assert!(pair_by_charpoly(&[]).is_empty());
    }
}
