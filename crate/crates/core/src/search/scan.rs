//! Ehlich block scans and characteristic polynomial grouping.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{construct_ehlich_block, CandidateGram};
use crate::linalg::{is_perfect_square, CharPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EhlichHit {
    pub sizes: Vec<usize>,
    pub det: BigInt,
    pub sqrt_det: BigInt,
}

fn partitions(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if n == 0 {
        out.push(prefix.clone());
        return;
    }
    for part in (1..=max.min(n)).rev() {
        prefix.push(part);
        partitions(n - part, part, prefix, out);
        prefix.pop();
    }
}

/// Every partition `v₁ ≥ … ≥ v_k` of `n` whose Ehlich block matrix has a
/// perfect-square determinant of at least `d_min²`, in descending order of
/// determinant and then of the partition.
pub fn ehlich_block_scan(n: usize, d_min: &BigInt) -> Result<Vec<EhlichHit>> {
    if n % 4 != 3 {
        return Err(Error::UnsupportedOrder {
            n,
            reason: "Ehlich block matrices need n = 3 mod 4".into(),
        });
    }
    let thr = d_min * d_min;
    let mut parts = Vec::new();
    partitions(n, n, &mut Vec::new(), &mut parts);
    let mut hits = Vec::new();
    for sizes in parts {
        // Blocks of size n would need entries equal to n.
        let b = match construct_ehlich_block(n, &sizes) {
            Ok(b) => b,
            Err(Error::NotInClass(_)) => continue,
            Err(e) => return Err(e),
        };
        if *b.det() < thr {
            continue;
        }
        if let Some(s) = is_perfect_square(b.det())? {
            hits.push(EhlichHit {
                sizes,
                det: b.det().clone(),
                sqrt_det: s,
            });
        }
    }
    hits.sort_by(|a, b| b.det.cmp(&a.det).then_with(|| b.sizes.cmp(&a.sizes)));
    Ok(hits)
}

/// Candidates sharing one characteristic polynomial.
#[derive(Clone, Debug)]
pub struct CharPolyClass {
    pub charpoly: CharPoly,
    pub det: BigInt,
    /// Indices into the input slice.
    pub members: Vec<usize>,
}

/// Groups candidates by characteristic polynomial. Classes are listed by
/// descending determinant, then by first member.
pub fn charpoly_classes(candidates: &[CandidateGram]) -> Vec<CharPolyClass> {
    let mut by_poly: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    let mut classes: Vec<CharPolyClass> = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let key = c.charpoly().to_strings();
        match by_poly.get(&key) {
            Some(&k) => classes[k].members.push(i),
            None => {
                by_poly.insert(key, classes.len());
                classes.push(CharPolyClass {
                    charpoly: c.charpoly().clone(),
                    det: c.det().clone(),
                    members: vec![i],
                });
            }
        }
    }
    classes.sort_by(|a, b| b.det.cmp(&a.det).then_with(|| a.members[0].cmp(&b.members[0])));
    classes
}

/// One determinant with the sizes of its characteristic polynomial classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityRow {
    pub det: BigInt,
    /// Class sizes, ascending.
    pub class_sizes: Vec<usize>,
}

impl MultiplicityRow {
    pub fn total(&self) -> usize {
        self.class_sizes.iter().sum()
    }

    /// Class sizes in compact form: `1,2`, `1,1`, or `1_3` for three
    /// singleton classes.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.class_sizes.len() {
            let s = self.class_sizes[i];
            let run = self.class_sizes[i..].iter().take_while(|&&x| x == s).count();
            if run >= 3 {
                parts.push(format!("{s}_{run}"));
            } else {
                parts.extend(std::iter::repeat(s.to_string()).take(run));
            }
            i += run;
        }
        parts.join(",")
    }
}

/// Per-determinant class multiplicities in descending determinant order.
pub fn multiplicity_report(classes: &[CharPolyClass]) -> Vec<MultiplicityRow> {
    let mut by_det: BTreeMap<BigInt, Vec<usize>> = BTreeMap::new();
    for c in classes {
        by_det.entry(c.det.clone()).or_default().push(c.members.len());
    }
    by_det
        .into_iter()
        .rev()
        .map(|(det, mut class_sizes)| {
            class_sizes.sort_unstable();
            MultiplicityRow { det, class_sizes }
        })
        .collect()
}
