//! Published reference data: candidate Gram matrices for odd orders up to
//! 21, the order-15 design, determinant ranges for orders 8 to 11 and the
//! candidate tables for orders 29, 33 and 37.
//!
//! Matrices are stored in the form they are usually written, which is not
//! always lexicographically maximal; compare against search output with
//! [`find_isomorphism`](crate::decompose::find_isomorphism).

use num_bigint::BigInt;
use num_traits::pow;

use crate::error::Result;
use crate::gram::{construct_d, construct_ehlich_block, construct_s, expand_counts, CandidateGram};
use crate::linalg::{IntMatrix, SignMatrix};

/// A named reference matrix with its expected determinant.
#[derive(Clone, Debug)]
pub struct KnownCandidate {
    pub name: String,
    pub gram: CandidateGram,
    /// Expected `sqrt(det) / 2^{n−1}`.
    pub normalized_sqrt_det: BigInt,
}

impl KnownCandidate {
    fn new(name: &str, gram: CandidateGram, base: u64, k: u64, e: usize) -> Self {
        KnownCandidate {
            name: name.into(),
            gram,
            normalized_sqrt_det: BigInt::from(base) * pow(BigInt::from(k), e),
        }
    }

    /// Expected `sqrt(det)`.
    pub fn sqrt_det(&self) -> BigInt {
        &self.normalized_sqrt_det * pow(BigInt::from(2), self.gram.n() - 1)
    }
}

/// Diagonal `n`, the leading block given explicitly, `tail` on the trailing
/// indices and `cross` everywhere else.
fn assemble(n: usize, lead: &[Vec<i64>], cross: i64, tail: &IntMatrix) -> Result<CandidateGram> {
    let k = lead.len();
    let m = IntMatrix::from_fn(n, n, |i, j| match (i < k, j < k) {
        (true, true) => lead[i][j] as i128,
        (false, false) => tail.get(i - k, j - k),
        _ => cross as i128,
    });
    CandidateGram::new(n, m)
}

/// Order-`p` matrix with diagonal `n`, off-diagonal entries 3 within the
/// given blocks and −1 elsewhere.
fn ehlich_tail(n: usize, sizes: &[usize]) -> IntMatrix {
    let mut label = Vec::new();
    for (b, &s) in sizes.iter().enumerate() {
        label.extend(std::iter::repeat(b).take(s));
    }
    let p = label.len();
    IntMatrix::from_fn(p, p, |i, j| {
        if i == j {
            n as i128
        } else if label[i] == label[j] {
            3
        } else {
            -1
        }
    })
}

/// `(n−1)I + J` of order `p`.
fn ones_tail(n: usize, p: usize) -> IntMatrix {
    IntMatrix::from_fn(p, p, |i, j| if i == j { n as i128 } else { 1 })
}

/// Ten leading indices in five pairs: the first pair has inner entry 5, the
/// others −3, and all entries between pairs are 1.
fn paired_lead(n: usize) -> Vec<Vec<i64>> {
    (0..10)
        .map(|i| {
            (0..10)
                .map(|j| {
                    if i == j {
                        n as i64
                    } else if i / 2 != j / 2 {
                        1
                    } else if i < 2 {
                        5
                    } else {
                        -3
                    }
                })
                .collect()
        })
        .collect()
}

fn ehlich(n: usize, sizes: &[usize]) -> CandidateGram {
    construct_ehlich_block(n, sizes).expect("valid Ehlich block matrix")
}

fn s(n: usize, runs: &[(i64, usize)]) -> CandidateGram {
    construct_s(n, &expand_counts(runs)).expect("valid S matrix")
}

fn d(n: usize, a: i64, v: &[(i64, usize)], w: &[(i64, usize)]) -> CandidateGram {
    construct_d(n, a, &expand_counts(v), &expand_counts(w)).expect("valid D matrix")
}

fn lead(rows: &[&[i64]]) -> Vec<Vec<i64>> {
    rows.iter().map(|r| r.to_vec()).collect()
}

/// Orders with a published candidate list at the maximal determinant.
pub const LISTED_ORDERS: [usize; 7] = [3, 7, 9, 11, 15, 17, 21];

/// Normalized threshold `d_min / 2^{n−1}` for each listed order: the
/// maximal determinant.
pub fn listed_threshold(n: usize) -> Option<BigInt> {
    let (base, k, e) = match n {
        3 => (1u64, 1u64, 0usize),
        7 => (9, 1, 0),
        9 => (56, 1, 0),
        11 => (320, 1, 0),
        15 => (25515, 1, 0),
        17 => (5, 4, 8),
        21 => (29, 5, 9),
        _ => return None,
    };
    Some(BigInt::from(base) * pow(BigInt::from(k), e))
}

/// Full threshold `d_min` for a listed order.
pub fn listed_d_min(n: usize) -> Option<BigInt> {
    listed_threshold(n).map(|t| t * pow(BigInt::from(2), n - 1))
}

/// Every candidate at or above the maximal determinant, in the order
/// listed.
pub fn listed_candidates(n: usize) -> Option<Vec<KnownCandidate>> {
    let c = KnownCandidate::new;
    let out = match n {
        3 => vec![c("B(1_3)", ehlich(3, &[1, 1, 1]), 1, 1, 0)],
        7 => vec![c("B(2_3,1)", ehlich(7, &[2, 2, 2, 1]), 9, 1, 0)],
        9 => vec![c("S(5,1_7)", s(9, &[(5, 1), (1, 7)]), 56, 1, 0)],
        11 => {
            let m = -1;
            let four = assemble(
                11,
                &lead(&[&[11, 3, 3], &[3, 11, m], &[3, m, 11]]),
                -1,
                &ehlich_tail(11, &[4, 1, 1, 1, 1]),
            )
            .expect("valid");
            let five = assemble(
                11,
                &lead(&[
                    &[11, 3, 3, m, m],
                    &[3, 11, m, 3, m],
                    &[3, m, 11, m, 3],
                    &[m, 3, m, 11, m],
                    &[m, m, 3, m, 11],
                ]),
                -1,
                &ehlich_tail(11, &[2, 2, 2]),
            )
            .expect("valid");
            let six = assemble(
                11,
                &lead(&[
                    &[11, 3, 3, 3, m],
                    &[3, 11, 3, m, m],
                    &[3, 3, 11, m, m],
                    &[3, m, m, 11, 3],
                    &[m, m, m, 3, 11],
                ]),
                -1,
                &ehlich_tail(11, &[2, 2, 2]),
            )
            .expect("valid");
            vec![
                c("B(3,2,1_6)", ehlich(11, &[3, 2, 1, 1, 1, 1, 1, 1]), 324, 1, 0),
                c("B(4,1_7)", ehlich(11, &[4, 1, 1, 1, 1, 1, 1, 1]), 324, 1, 0),
                c("B(5,1_6)", ehlich(11, &[5, 1, 1, 1, 1, 1, 1]), 324, 1, 0),
                c("[3x3 lead | B(4,1_4)]", four, 324, 1, 0),
                c("B(5,2_3)", ehlich(11, &[5, 2, 2, 2]), 320, 1, 0),
                c("[5x5 lead | B(2_3)] a", five, 320, 1, 0),
                c("[5x5 lead | B(2_3)] b", six, 320, 1, 0),
            ]
        }
        15 => vec![
            c("B(4_3,3)", ehlich(15, &[4, 4, 4, 3]), 105 * 243, 1, 0),
            c("B(6,3,2_3)", ehlich(15, &[6, 3, 2, 2, 2]), 105 * 243, 1, 0),
            c("B(3_4,2,1)", ehlich(15, &[3, 3, 3, 3, 2, 1]), 108 * 243, 1, 0),
            c("B(3_5)", ehlich(15, &[3, 3, 3, 3, 3]), 108 * 243, 1, 0),
        ],
        17 => {
            let m6 = assemble(
                17,
                &lead(&[
                    &[17, -3, -3, -3, 1, 1],
                    &[-3, 17, -3, 1, 1, 1],
                    &[-3, -3, 17, 1, 1, 1],
                    &[-3, 1, 1, 17, -3, -3],
                    &[1, 1, 1, -3, 17, 1],
                    &[1, 1, 1, -3, 1, 17],
                ]),
                1,
                &ones_tail(17, 11),
            )
            .expect("valid");
            let paired = assemble(17, &paired_lead(17), 1, &ones_tail(17, 7)).expect("valid");
            vec![
                c("S(-3,-3,1_14)", s(17, &[(-3, 2), (1, 14)]), 22, 4, 7),
                c("S(5,-3_2,1_13)", s(17, &[(5, 1), (-3, 2), (1, 13)]), 21, 4, 7),
                c(
                    "D(-3;-3_3,1_12;1_3,-3,1_11)",
                    d(17, -3, &[(-3, 3), (1, 12)], &[(1, 3), (-3, 1), (1, 11)]),
                    83,
                    4,
                    6,
                ),
                c(
                    "D(1;5,-3,1_13;1,-3_3,1_11)",
                    d(17, 1, &[(5, 1), (-3, 1), (1, 13)], &[(1, 1), (-3, 3), (1, 11)]),
                    81,
                    4,
                    6,
                ),
                c("[paired lead | 16I+J]", paired, 5175, 4, 3),
                c("M17_1", d(17, 1, &[(1, 1), (-3, 6), (1, 8)], &[(-3, 1), (1, 14)]), 5, 4, 8),
                c("M17_2", s(17, &[(-3, 8), (1, 8)]), 5, 4, 8),
                c("M17_3", s(17, &[(-3, 16)]), 5, 4, 8),
                c("M17_4", d(17, -3, &[(-3, 2), (1, 13)], &[(-3, 2), (1, 13)]), 5, 4, 8),
                c("M17_5", s(17, &[(5, 2), (-3, 2), (1, 12)]), 5, 4, 8),
                c("M17_6", m6, 5, 4, 8),
            ]
        }
        21 => {
            let paired = assemble(21, &paired_lead(21), 1, &ones_tail(21, 11)).expect("valid");
            vec![
                c("S(-3_5,1_15)", s(21, &[(-3, 5), (1, 15)]), 6, 5, 10),
                c("[paired lead | 20I+J]", paired, 18432, 5, 5),
                c("M21_1", s(21, &[(5, 1), (-3, 5), (1, 14)]), 29, 5, 9),
                c("M21_2", s(21, &[(5, 4), (1, 16)]), 29, 5, 9),
                c("M21_3", s(21, &[(-7, 1), (-3, 2), (1, 17)]), 29, 5, 9),
            ]
        }
        _ => return None,
    };
    Some(out)
}

/// Names of the listed candidates that are Gram matrices of some ±1
/// matrix (each decomposes paired with itself); every other pairing of
/// listed candidates has no decomposition.
pub fn decomposable_names(n: usize) -> Vec<&'static str> {
    match n {
        3 => vec!["B(1_3)"],
        7 => vec!["B(2_3,1)"],
        9 => vec!["S(5,1_7)"],
        11 => vec!["B(5,2_3)", "[5x5 lead | B(2_3)] a", "[5x5 lead | B(2_3)] b"],
        15 => vec!["B(4_3,3)"],
        17 => vec!["M17_3"],
        21 => vec!["M21_2"],
        _ => Vec::new(),
    }
}

/// Pairs of listed candidates (by index) with equal characteristic
/// polynomials, self pairs excluded.
pub fn listed_charpoly_twins(n: usize) -> Vec<(usize, usize)> {
    match n {
        17 => vec![(6, 9)],
        21 => vec![(2, 4)],
        _ => Vec::new(),
    }
}

/// The two order-19 Gram matrices of the best known determinant
/// `833·4⁶·2¹⁸`.
pub fn order_19_candidates() -> Vec<KnownCandidate> {
    let m = -1;
    let first = assemble(
        19,
        &lead(&[
            &[19, 3, 3, 3, m, m, m],
            &[3, 19, 3, 3, m, m, m],
            &[3, 3, 19, 3, m, m, m],
            &[3, 3, 3, 19, 3, 3, 3],
            &[m, m, m, 3, 19, 3, 3],
            &[m, m, m, 3, 3, 19, 3],
            &[m, m, m, 3, 3, 3, 19],
        ]),
        -1,
        &ehlich_tail(19, &[3, 3, 3, 3]),
    )
    .expect("valid");
    let second = assemble(
        19,
        &lead(&[
            &[19, m, m, 3, m, m, 3, m, m, 3],
            &[m, 19, 3, 3, m, m, m, m, m, m],
            &[m, 3, 19, 3, m, m, m, m, m, m],
            &[3, 3, 3, 19, m, m, m, m, m, m],
            &[m, m, m, m, 19, 3, 3, m, m, m],
            &[m, m, m, m, 3, 19, 3, m, m, m],
            &[3, m, m, m, 3, 3, 19, m, m, m],
            &[m, m, m, m, m, m, m, 19, 3, 3],
            &[m, m, m, m, m, m, m, 3, 19, 3],
            &[3, m, m, m, m, m, m, 3, 3, 19],
        ]),
        -1,
        &ehlich_tail(19, &[3, 3, 3]),
    )
    .expect("valid");
    vec![
        KnownCandidate::new("N19_1", first, 833, 4, 6),
        KnownCandidate::new("N19_2", second, 833, 4, 6),
    ]
}

/// The order-11 candidates whose normalized determinants 300 and 306 are
/// absent from the range and must therefore not decompose.
pub fn order_11_gap_candidates() -> Vec<KnownCandidate> {
    let m = -1;
    let lead5 = lead(&[
        &[11, 3, 3, m, m],
        &[3, 11, m, 3, m],
        &[3, m, 11, m, 3],
        &[m, 3, m, 11, 3],
        &[m, m, 3, 3, 11],
    ]);
    let lead4 = lead(&[&[11, 3, 3, m], &[3, 11, m, 3], &[3, m, 11, 3], &[m, 3, 3, 11]]);
    let lead5b = lead(&[
        &[11, 3, 3, 3, m],
        &[3, 11, m, m, 3],
        &[3, m, 11, m, m],
        &[3, m, m, 11, m],
        &[m, 3, m, m, 11],
    ]);
    let a = assemble(11, &lead5, -1, &ehlich_tail(11, &[3, 3])).expect("valid");
    let b = assemble(11, &lead4, -1, &ehlich_tail(11, &[3, 3, 1])).expect("valid");
    let c = assemble(11, &lead5, -1, &ehlich_tail(11, &[4, 1, 1])).expect("valid");
    let e = assemble(11, &lead5b, -1, &ehlich_tail(11, &[3, 1, 1, 1])).expect("valid");
    [a, b, c, e]
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            let v = if crate::linalg::is_perfect_square(g.det()).ok().flatten() == Some(BigInt::from(306 << 10)) {
                306
            } else {
                300
            };
            KnownCandidate::new(&format!("G11_{}", i + 1), g, v, 1, 0)
        })
        .collect()
}

/// The order-15 design with `RRᵀ = RᵀR = B(4₃,3)`, assembled from its
/// 4×4, 4×3 and 3×4 building blocks.
pub fn order_15_design() -> SignMatrix {
    let m = -1i8;
    let a: [[i8; 4]; 4] = [[m, m, m, m], [m, 1, m, m], [m, m, 1, m], [m, m, m, 1]];
    let b: [[i8; 4]; 4] = [[1, m, m, m], [m, m, 1, 1], [m, 1, m, 1], [m, 1, 1, m]];
    let c: [[i8; 4]; 4] = [[m, 1, 1, 1], [1, 1, 1, 1], [1, 1, 1, 1], [1, 1, 1, 1]];
    let dd: [[i8; 3]; 4] = [[m, m, m], [1, m, m], [m, 1, m], [m, m, 1]];
    let e: [[i8; 4]; 3] = [[m, 1, m, m], [m, m, 1, m], [m, m, m, 1]];
    let mut rows: Vec<Vec<i8>> = Vec::with_capacity(15);
    let band = |x: &[[i8; 4]; 4], y: &[[i8; 4]; 4], z: &[[i8; 4]; 4], rows: &mut Vec<Vec<i8>>| {
        for i in 0..4 {
            let mut r = Vec::with_capacity(15);
            r.extend_from_slice(&x[i]);
            r.extend_from_slice(&y[i]);
            r.extend_from_slice(&z[i]);
            r.extend_from_slice(&dd[i]);
            rows.push(r);
        }
    };
    band(&a, &b, &c, &mut rows);
    band(&c, &a, &b, &mut rows);
    band(&b, &c, &a, &mut rows);
    for i in 0..3 {
        let mut r = Vec::with_capacity(15);
        for _ in 0..3 {
            r.extend_from_slice(&e[i]);
        }
        r.extend_from_slice(&[1, 1, 1]);
        rows.push(r);
    }
    SignMatrix::from_rows(&rows).expect("15 rows of 15")
}

/// Normalized determinant multiplicities of the order-9 candidates at
/// threshold 41.
pub const ORDER_9_RANGE_COUNTS: [(u64, usize); 5] = [(56, 1), (48, 4), (45, 1), (44, 2), (42, 1)];

/// Normalized determinant multiplicities of the order-11 candidates at
/// threshold 269; 196 in total.
pub const ORDER_11_RANGE_COUNTS: [(u64, usize); 28] = [
    (270, 47),
    (271, 1),
    (272, 37),
    (273, 8),
    (274, 2),
    (275, 8),
    (276, 5),
    (278, 1),
    (279, 7),
    (280, 10),
    (282, 2),
    (283, 1),
    (284, 2),
    (285, 2),
    (286, 1),
    (288, 41),
    (291, 1),
    (294, 2),
    (295, 1),
    (296, 1),
    (297, 1),
    (300, 3),
    (304, 2),
    (306, 1),
    (312, 1),
    (315, 1),
    (320, 3),
    (324, 4),
];

/// Attained normalized determinants as inclusive intervals, orders 8 to 11.
pub fn determinant_range(n: usize) -> Option<Vec<(u64, u64)>> {
    let single = |v: u64| (v, v);
    Some(match n {
        8 => vec![(0, 18), single(20), single(24), single(32)],
        9 => vec![(0, 40), single(42), (44, 45), single(48), single(56)],
        10 => vec![
            (0, 102),
            (104, 105),
            single(108),
            single(110),
            single(112),
            (116, 117),
            single(120),
            single(125),
            single(128),
            single(144),
        ],
        11 => vec![
            (0, 268),
            (270, 276),
            (278, 280),
            (282, 286),
            single(288),
            single(291),
            (294, 297),
            single(304),
            single(312),
            single(315),
            single(320),
        ],
        _ => return None,
    })
}

/// Lowest missing normalized determinant for the odd orders with a
/// certified range.
pub fn range_gap_floor(n: usize) -> Option<u64> {
    match n {
        9 => Some(41),
        11 => Some(269),
        _ => None,
    }
}

/// Order-8 value listed elsewhere but not attained.
pub const ORDER_8_MISPRINT: u64 = 19;

/// One row of the large-order candidate tables: normalized `sqrt(det)` as
/// `base·k^e` with its multiplicity column.
#[derive(Clone, Copy, Debug)]
pub struct LargeOrderRow {
    pub base: u64,
    pub k: u64,
    pub e: u32,
    pub classes: &'static str,
}

impl LargeOrderRow {
    pub fn value(&self) -> BigInt {
        BigInt::from(self.base) * pow(BigInt::from(self.k), self.e as usize)
    }
}

const fn row(base: u64, k: u64, e: u32, classes: &'static str) -> LargeOrderRow {
    LargeOrderRow { base, k, e, classes }
}

/// Candidate tables for orders 29, 33 and 37 with their thresholds.
pub fn large_order_table(n: usize) -> Option<(LargeOrderRow, Vec<LargeOrderRow>)> {
    Some(match n {
        29 => (
            row(342, 7, 12, ""),
            vec![
                row(51, 7, 13, "2"),
                row(355, 7, 12, "1"),
                row(352, 7, 12, "1"),
                row(50, 7, 13, "1,2"),
                row(2448, 7, 11, "1"),
                row(119808, 7, 9, "1"),
                row(349, 7, 12, "1"),
                row(348, 7, 12, "1"),
                row(2432, 7, 11, "1"),
                row(2430, 7, 11, "1"),
                row(347, 7, 12, "2"),
                row(118656, 7, 9, "1"),
                row(2416, 7, 11, "1"),
                row(345, 7, 12, "1,3,4"),
                row(2413, 7, 11, "1"),
                row(118128, 7, 9, "1"),
                row(344, 7, 12, "1_3"),
                row(2403, 7, 11, "1"),
                row(49, 7, 13, "1_4,2"),
                row(2400, 7, 11, "1_6,2"),
                row(117504, 7, 9, "1_3"),
                row(2397, 7, 11, "3"),
                row(5750784, 7, 7, "1"),
                row(342, 7, 12, "1_3,2,3,7"),
            ],
        ),
        33 => (
            row(485, 8, 14, ""),
            vec![
                row(495, 8, 14, "1"),
                row(252315, 8, 11, "1"),
                row(3929, 8, 13, "1"),
                row(490, 8, 14, "1,1"),
                row(3919, 8, 13, "1"),
                row(489, 8, 14, "1"),
                row(3911, 8, 13, "1"),
                row(250047, 8, 11, "1"),
                row(1023942465, 8, 7, "1"),
                row(3906, 8, 13, "3"),
                row(61, 8, 15, "1_3"),
                row(31203, 8, 12, "1"),
                row(3898, 8, 13, "2"),
                row(3897, 8, 13, "1,1"),
                row(3895, 8, 13, "1"),
                row(31131, 8, 12, "1"),
                row(3889, 8, 13, "1,2"),
                row(31108, 8, 12, "1"),
                row(486, 8, 14, "1_5,3"),
                row(31098, 8, 12, "1"),
                row(3887, 8, 13, "1"),
                row(248724, 8, 11, "1"),
                row(3885, 8, 13, "1,2"),
                row(31050, 8, 12, "4"),
                row(3881, 8, 13, "1,1"),
            ],
        ),
        37 => (
            row(659, 9, 16, ""),
            vec![
                row(680, 9, 16, "1"),
                row(75, 9, 17, "1,1"),
                row(672, 9, 16, "1"),
                row(485070, 9, 13, "1"),
                row(665, 9, 16, "1"),
                row(53760, 9, 14, "1"),
                row(4352000, 9, 12, "1"),
                row(663, 9, 16, "1,1"),
                row(483000, 9, 13, "1"),
                row(4345600, 9, 12, "1"),
                row(5952, 9, 15, "1"),
                row(661, 9, 16, "2"),
                row(5946, 9, 15, "1"),
                row(53504, 9, 14, "1"),
                row(5942, 9, 15, "2"),
                row(660, 9, 16, "1_3"),
                row(659, 9, 16, "1"),
            ],
        ),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gram_cols, gram_rows};

    #[test]
    fn listed_determinants() {
        for n in LISTED_ORDERS {
            for c in listed_candidates(n).unwrap() {
                assert_eq!(c.gram.sqrt_det(), Some(c.sqrt_det()), "{}", c.name);
                assert!(c.normalized_sqrt_det >= listed_threshold(n).unwrap());
            }
        }
        for c in order_19_candidates().into_iter().chain(order_11_gap_candidates()) {
            assert_eq!(c.gram.sqrt_det(), Some(c.sqrt_det()), "{}", c.name);
        }
    }

    #[test]
    fn gap_candidates_split_three_and_one() {
        let v: Vec<u64> = order_11_gap_candidates()
            .iter()
            .map(|c| c.normalized_sqrt_det.to_string().parse().unwrap())
            .collect();
        assert_eq!(v.iter().filter(|&&x| x == 300).count(), 3);
        assert_eq!(v.iter().filter(|&&x| x == 306).count(), 1);
    }

    #[test]
    fn order_15_design_has_block_gram() {
        let r = order_15_design();
        let b = construct_ehlich_block(15, &[4, 4, 4, 3]).unwrap();
        assert_eq!(gram_rows(&r), *b.matrix());
        assert_eq!(gram_cols(&r), *b.matrix());
        assert_eq!(r.det().magnitude(), BigInt::from(25515u64 << 14).magnitude());
    }

    #[test]
    fn table_totals() {
        assert_eq!(ORDER_11_RANGE_COUNTS.iter().map(|x| x.1).sum::<usize>(), 196);
        assert_eq!(ORDER_9_RANGE_COUNTS.iter().map(|x| x.1).sum::<usize>(), 9);
        for n in 8..=11 {
            let r = determinant_range(n).unwrap();
            assert!(r.windows(2).all(|w| w[0].1 + 1 < w[1].0));
        }
    }
}
