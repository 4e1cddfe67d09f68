//! The range of `|det|/2^{n−1}` over ±1 matrices: the {0,1} reduction, gap
//! certification by threshold search plus decomposition, and a randomized
//! witness finder.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{pow, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::KNOWN_MDN;
use crate::decompose::{full_decompose, pair_by_charpoly, DecomposeConfig, DecompositionProblem, Verdict};
use crate::error::{Error, Result};
use crate::gram::CandidateGram;
use crate::known::determinant_range;
use crate::linalg::{IntMatrix, SignMatrix};
use crate::search::{charpoly_classes, multiplicity_report, search, SearchConfig};

/// Normalizes `R` (first row all +1, first column below the corner all −1),
/// adds the first row to the others and halves the trailing block. The
/// result has order `n−1` and `det(R) = 2^{n−1}·det(result)`; for `n = 2`
/// only the absolute values agree.
pub fn to_zero_one(r: &SignMatrix) -> IntMatrix {
    let n = r.order();
    if n <= 1 {
        return IntMatrix::zeros(0, 0);
    }
    let mut m = r.clone();
    let mut flips = 0usize;
    for j in 0..n {
        if m.get(0, j) < 0 {
            m.negate_col(j);
            flips += 1;
        }
    }
    for i in 1..n {
        if m.get(i, 0) > 0 {
            m.negate_row(i);
            flips += 1;
        }
    }
    let mut z = IntMatrix::from_fn(n - 1, n - 1, |i, j| ((m.get(i + 1, j + 1) + 1) / 2) as i128);
    if flips % 2 == 1 && n > 2 {
        for j in 0..n - 1 {
            let (a, b) = (z.get(0, j), z.get(1, j));
            z.set(0, j, b);
            z.set(1, j, a);
        }
    }
    z
}

/// `|det(R)| / 2^{n−1}`.
pub fn normalized_det(r: &SignMatrix) -> BigInt {
    let d = r.det();
    let d = if d < BigInt::zero() { -d } else { d };
    d >> (r.order().saturating_sub(1))
}

/// Normalized maximal determinant for orders up to 18.
pub fn mdn(n: usize) -> Option<u64> {
    (1..=KNOWN_MDN.len()).contains(&n).then(|| KNOWN_MDN[n - 1])
}

/// The attained normalized values assumed for an order: the published
/// range where one exists, otherwise everything up to the maximum.
pub fn claimed_range(n: usize) -> Option<Vec<(u64, u64)>> {
    determinant_range(n).or_else(|| (n <= 7).then(|| vec![(0, mdn(n).expect("small order"))]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    /// No candidate Gram matrix has this determinant.
    NoCandidate,
    /// Candidates exist and every row/column pairing was proved `none`.
    NoDecomposition,
    /// Some pairing yielded a witness: the value is attained after all.
    Decomposes,
    /// Some pairing ran out of budget.
    Inconclusive,
    /// Below the search threshold; not examined.
    BelowThreshold,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapCertificate {
    pub value: u64,
    pub evidence: Evidence,
    pub candidates: usize,
    pub pairs: usize,
}

impl GapCertificate {
    pub fn certified(&self) -> bool {
        matches!(self.evidence, Evidence::NoCandidate | Evidence::NoDecomposition)
    }
}

/// Candidates found at one normalized determinant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValueCount {
    pub value: u64,
    pub candidates: usize,
    /// Characteristic polynomial class sizes, rendered as in the tables.
    pub classes: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetSpectrum {
    pub n: usize,
    pub gap_floor: u64,
    /// Claimed attained values as inclusive intervals.
    pub attained: Vec<(u64, u64)>,
    /// Complement of `attained` in `[0, max]`, as inclusive intervals.
    pub gaps: Vec<(u64, u64)>,
    /// One entry per gap value and per candidate value above the maximum.
    pub certification: Vec<GapCertificate>,
    pub found: Vec<ValueCount>,
    pub total_candidates: usize,
    /// Candidates whose determinant no ±1 matrix can have.
    pub indivisible: usize,
    /// Every examined value outside `attained` is certified.
    pub complete: bool,
}

impl DetSpectrum {
    pub fn max_attained(&self) -> u64 {
        self.attained.last().map_or(0, |r| r.1)
    }

    pub fn is_attained(&self, v: u64) -> bool {
        self.attained.iter().any(|&(a, b)| a <= v && v <= b)
    }

    pub fn is_certified_gap(&self, v: u64) -> bool {
        self.certification.iter().any(|c| c.value == v && c.certified())
    }
}

fn complement(attained: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut gaps = Vec::new();
    let mut next = 0u64;
    for &(a, b) in attained {
        if a > next {
            gaps.push((next, a - 1));
        }
        next = b + 1;
    }
    gaps
}

/// Decides every charpoly-compatible pair among `cands`; all `none` gives
/// `NoDecomposition`.
fn certify_value(cands: &[CandidateGram], cfg: &DecomposeConfig) -> Result<(Evidence, usize)> {
    let pairs = pair_by_charpoly(cands);
    let verdicts = pairs
        .par_iter()
        .map(|&(i, j)| {
            let p = DecompositionProblem::new(cands[i].clone(), cands[j].clone())?;
            Ok(full_decompose(&p, cfg)?.verdict)
        })
        .collect::<Result<Vec<Verdict>>>()?;
    let ev = if verdicts.contains(&Verdict::Witness) {
        Evidence::Decomposes
    } else if verdicts.contains(&Verdict::Inconclusive) {
        Evidence::Inconclusive
    } else {
        Evidence::NoDecomposition
    };
    Ok((ev, pairs.len()))
}

/// Searches at `gap_floor·2^{n−1}` and certifies every value at or above
/// the floor that is not claimed attained, using the published range for
/// the claims.
pub fn range_certify(n: usize, gap_floor: u64) -> Result<DetSpectrum> {
    let claimed = claimed_range(n)
        .ok_or_else(|| Error::UnsupportedOrder {
            n,
            reason: "no claimed determinant range".into(),
        })?;
    range_certify_with(n, gap_floor, &claimed, &DecomposeConfig::existence())
}

pub fn range_certify_with(
    n: usize,
    gap_floor: u64,
    claimed: &[(u64, u64)],
    dcfg: &DecomposeConfig,
) -> Result<DetSpectrum> {
    if n % 2 == 0 {
        return Err(Error::EvenOrder(n));
    }
    let d_min = BigInt::from(gap_floor) * pow(BigInt::from(2), n - 1);
    let cfg = SearchConfig::new(n, d_min);
    let out = search(&cfg)?;
    let scale = pow(BigInt::from(2), n - 1);
    let mut by_value: BTreeMap<u64, Vec<CandidateGram>> = BTreeMap::new();
    let mut indivisible = 0;
    for c in out.candidates {
        let root = c.sqrt_det().expect("perfect square");
        // The determinant of a ±1 matrix is a multiple of 2^{n−1}.
        if !(&root % &scale).is_zero() {
            indivisible += 1;
            continue;
        }
        let v = root / &scale;
        let v = v.to_u64().ok_or_else(|| Error::InvalidArgument("determinant out of range".into()))?;
        by_value.entry(v).or_default().push(c);
    }

    let mut found = Vec::new();
    let mut total = 0;
    for (&v, cands) in by_value.iter().rev() {
        let rows = multiplicity_report(&charpoly_classes(cands));
        found.push(ValueCount {
            value: v,
            candidates: cands.len(),
            classes: rows.first().map(|r| r.render()).unwrap_or_default(),
        });
        total += cands.len();
    }

    let mut attained = claimed.to_vec();
    attained.sort_unstable();
    let gaps = complement(&attained);
    let max = attained.last().map_or(0, |r| r.1);
    let is_attained = |v: u64| attained.iter().any(|&(a, b)| a <= v && v <= b);

    let mut certification = Vec::new();
    let mut values: Vec<u64> = gaps.iter().flat_map(|&(a, b)| a..=b).collect();
    values.extend(by_value.keys().copied().filter(|&v| v > max));
    for v in values {
        if v < gap_floor {
            certification.push(GapCertificate {
                value: v,
                evidence: Evidence::BelowThreshold,
                candidates: 0,
                pairs: 0,
            });
            continue;
        }
        let cert = match by_value.get(&v) {
            None => GapCertificate {
                value: v,
                evidence: Evidence::NoCandidate,
                candidates: 0,
                pairs: 0,
            },
            Some(cands) => {
                let (evidence, pairs) = certify_value(cands, dcfg)?;
                GapCertificate {
                    value: v,
                    evidence,
                    candidates: cands.len(),
                    pairs,
                }
            }
        };
        certification.push(cert);
    }
    let complete = certification
        .iter()
        .all(|c| c.certified() || (c.evidence == Evidence::BelowThreshold && is_attained(c.value)));
    Ok(DetSpectrum {
        n,
        gap_floor,
        attained,
        gaps,
        certification,
        found,
        total_candidates: total + indivisible,
        indivisible,
        complete,
    })
}

/// Restarts and steps per restart for [`witness_search`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Effort {
    pub restarts: usize,
    pub steps: usize,
    pub seed: u64,
}

impl Default for Effort {
    fn default() -> Self {
        Effort {
            restarts: 10_000,
            steps: 1_000,
            seed: 0,
        }
    }
}

/// Floating-point |det|; exact for the small orders this is used on, and
/// every hit is re-checked exactly.
fn det_f64(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
            .expect("nonempty");
        let piv = a[p * n + k];
        if piv == 0.0 {
            return 0.0;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
        }
        det *= piv;
        for i in k + 1..n {
            let f = a[i * n + k] / piv;
            if f != 0.0 {
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
    }
    det.abs()
}

/// Randomized hill climbing on single-entry flips towards
/// `|det| = target·2^{n−1}`. A `None` proves nothing.
pub fn witness_search(n: usize, target: u64, effort: &Effort) -> Option<SignMatrix> {
    if n == 0 {
        return None;
    }
    let scale = 2f64.powi(n as i32 - 1);
    let goal = target as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(effort.seed);
    let mut buf = vec![0.0f64; n * n];
    let value = |m: &[i8], buf: &mut Vec<f64>| {
        buf.iter_mut().zip(m).for_each(|(b, &v)| *b = v as f64);
        (det_f64(buf, n) / scale).round()
    };
    for _ in 0..effort.restarts {
        let mut m: Vec<i8> = (0..n * n).map(|_| if rng.gen() { 1 } else { -1 }).collect();
        let mut cur = value(&m, &mut buf);
        for _ in 0..effort.steps {
            if cur == goal {
                let r = SignMatrix::new(n, m.clone()).expect("signs");
                if normalized_det(&r) == BigInt::from(target) {
                    return Some(r);
                }
            }
            let k = rng.gen_range(0..n * n);
            m[k] = -m[k];
            let next = value(&m, &mut buf);
            if (next - goal).abs() <= (cur - goal).abs() {
                cur = next;
            } else {
                m[k] = -m[k];
            }
        }
        if cur == goal {
            let r = SignMatrix::new(n, m).expect("signs");
            if normalized_det(&r) == BigInt::from(target) {
                return Some(r);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::known::{order_15_design, ORDER_9_RANGE_COUNTS};
    use crate::linalg::det_exact;

    #[test]
    fn zero_one_reduction() {
        let one = SignMatrix::new(1, vec![1]).unwrap();
        assert_eq!(to_zero_one(&one).order(), 0);
        let r = order_15_design();
        let z = to_zero_one(&r);
        assert_eq!(z.order(), 14);
        assert!(z.entries().iter().all(|&v| v == 0 || v == 1));
        let d = det_exact(&z).unwrap();
        assert_eq!(d.clone() * pow(BigInt::from(2), 14), r.det());
        assert_eq!(d.magnitude(), BigInt::from(25515).magnitude());
    }

    #[test]
    fn order_nine_range() {
        let s = range_certify(9, 41).unwrap();
        let got: Vec<(u64, usize)> = s.found.iter().map(|v| (v.value, v.candidates)).collect();
        assert_eq!(got, ORDER_9_RANGE_COUNTS.to_vec());
        assert!(s.complete);
        assert!(s.is_certified_gap(41));
        assert!(s.is_certified_gap(43));
        assert!(!s.is_certified_gap(44));
    }

    #[test]
    fn order_eleven_range() {
        let s = range_certify(11, 269).unwrap();
        assert_eq!(s.total_candidates, 196);
        let got: Vec<(u64, usize)> = s.found.iter().rev().map(|v| (v.value, v.candidates)).collect();
        assert_eq!(got, crate::known::ORDER_11_RANGE_COUNTS.to_vec());
        for v in [300, 306, 324] {
            let c = s.certification.iter().find(|c| c.value == v).unwrap();
            assert_eq!(c.evidence, Evidence::NoDecomposition, "{v}");
        }
        assert!(s.complete);
    }

    #[test]
    fn order_three_has_no_gaps() {
        let s = range_certify(3, 2).unwrap();
        assert_eq!(s.attained, vec![(0, 1)]);
        assert!(s.gaps.is_empty());
        assert!(s.certification.is_empty());
        assert!(s.complete);
    }

    #[test]
    fn witnesses_for_attained_values() {
        let e = Effort {
            restarts: 2000,
            steps: 300,
            seed: 1,
        };
        let r = witness_search(7, 9, &e).unwrap();
        assert_eq!(normalized_det(&r), BigInt::from(9));
        let r = witness_search(9, 56, &e).unwrap();
        assert_eq!(normalized_det(&r), BigInt::from(56));
        let small = Effort {
            restarts: 50,
            steps: 300,
            seed: 2,
        };
        assert!(witness_search(9, 41, &small).is_none());
    }
}
