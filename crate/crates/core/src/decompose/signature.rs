//! Block-sum signatures of the rows and columns of a putative factor and
//! the filters that prune them.

use serde::{Deserialize, Serialize};

use super::cells::CellStructure;
use crate::linalg::IntMatrix;

/// Per-cell element sums of a ±1 vector, indexed by the cells of the
/// matrix whose quadratic form the vector enters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockSignature {
    pub sums: Vec<i64>,
}

impl BlockSignature {
    pub fn total(&self) -> i64 {
        self.sums.iter().sum()
    }
}

impl std::fmt::Display for BlockSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.sums.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Every parity-normalized signature `s` (each `s_p ≡ |C_p| mod 2`,
/// `|s_p| ≤ |C_p|`, `Σ s_p ≡ −n mod 4`) whose quadratic form under `other`
/// equals `rhs`.
pub fn signature_solutions(other: &CellStructure, rhs: i64) -> Vec<BlockSignature> {
    let n = other.order() as i64;
    let sizes: Vec<i64> = other.sizes().into_iter().map(|c| c as i64).collect();
    let mut out = Vec::new();
    let mut s: Vec<i64> = sizes.iter().map(|&c| -c).collect();
    loop {
        if (s.iter().sum::<i64>() + n).rem_euclid(4) == 0 && other.quad(&s) == rhs {
            out.push(BlockSignature { sums: s.clone() });
        }
        let mut p = 0;
        loop {
            if p == s.len() {
                return out;
            }
            if s[p] < sizes[p] {
                s[p] += 2;
                break;
            }
            s[p] = -sizes[p];
            p += 1;
        }
    }
}

/// Collapses signatures to one representative per orbit under permutations
/// of interchangeable cells (values sorted ascending within each group).
pub fn collapse_orbits(other: &CellStructure, sigs: &[BlockSignature]) -> Vec<BlockSignature> {
    let groups = other.interchangeable();
    let mut out: Vec<BlockSignature> = sigs
        .iter()
        .map(|s| {
            let mut sums = s.sums.clone();
            for g in &groups {
                let mut vals: Vec<i64> = g.iter().map(|&p| s.sums[p]).collect();
                vals.sort_unstable();
                for (&p, v) in g.iter().zip(vals) {
                    sums[p] = v;
                }
            }
            BlockSignature { sums }
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Attainable inner products of two ±1 vectors of length `c` with sums `s`
/// and `t`: an arithmetic progression with step 4.
pub fn inner_product_range(c: i64, s: i64, t: i64) -> (i64, i64) {
    let (a, b) = ((c + s) / 2, (c + t) / 2);
    let lo_u = (a + b - c).max(0);
    let hi_u = a.min(b);
    (c - 2 * a - 2 * b + 4 * lo_u, c - 2 * a - 2 * b + 4 * hi_u)
}

/// Whether two vectors with signatures `s`, `t` (cells of `other`) can have
/// inner product `ip` and bilinear form `xᵀ·other·y = target`.
pub fn pair_compatible(other: &CellStructure, s: &[i64], t: &[i64], ip: i64, target: i64) -> bool {
    // Group per-cell inner products by their weight in the bilinear form.
    let mut groups: Vec<(i64, i64, i64)> = Vec::new(); // (weight, lo, hi)
    for p in 0..other.len() {
        let c = other.size(p) as i64;
        let (lo, hi) = inner_product_range(c, s[p], t[p]);
        let w = other.weight(p);
        match groups.iter_mut().find(|g| g.0 == w) {
            Some(g) => {
                g.1 += lo;
                g.2 += hi;
            }
            None => groups.push((w, lo, hi)),
        }
    }
    let rest = target - other.bilinear(s, t);
    fn rec(groups: &[(i64, i64, i64)], ip: i64, rest: i64) -> bool {
        let (w, lo, hi) = groups[0];
        if groups.len() == 1 {
            return ip >= lo && ip <= hi && (ip - lo) % 4 == 0 && w * ip == rest;
        }
        let mut v = lo;
        while v <= hi {
            if rec(&groups[1..], ip - v, rest - w * v) {
                return true;
            }
            v += 4;
        }
        false
    }
    rec(&groups, ip, rest)
}

/// Signature domains of the rows (or columns) of the factor, one list per
/// cell of the Gram matrix on that side.
#[derive(Clone, Debug)]
pub struct SideDomains {
    pub own: CellStructure,
    pub other: CellStructure,
    pub gram: IntMatrix,
    pub square: IntMatrix,
    pub sigs: Vec<Vec<BlockSignature>>,
    pub alive: Vec<Vec<bool>>,
}

impl SideDomains {
    /// Solves the diagonal equations `m_jᵀm_j = x_jᵀ·other·x_j` per cell.
    pub fn new(gram: &IntMatrix, other_gram: &IntMatrix) -> crate::Result<Self> {
        let own = CellStructure::new(gram)?;
        let other = CellStructure::new(other_gram)?;
        let square = gram.mul(gram)?;
        let sigs: Vec<Vec<BlockSignature>> = own
            .cells()
            .iter()
            .map(|c| signature_solutions(&other, square.get(c[0], c[0]) as i64))
            .collect();
        let alive = sigs.iter().map(|s| vec![true; s.len()]).collect();
        Ok(SideDomains {
            own,
            other,
            gram: gram.clone(),
            square,
            sigs,
            alive,
        })
    }

    pub fn alive_count(&self, p: usize) -> usize {
        self.alive[p].iter().filter(|a| **a).count()
    }

    pub fn is_wiped_out(&self) -> bool {
        (0..self.own.len()).any(|p| self.alive_count(p) == 0)
    }

    pub fn alive_sigs(&self, p: usize) -> Vec<BlockSignature> {
        self.sigs[p]
            .iter()
            .zip(&self.alive[p])
            .filter(|(_, a)| **a)
            .map(|(s, _)| s.clone())
            .collect()
    }

    /// Representative pair of distinct indices in cells `p` and `q`.
    fn pair_indices(&self, p: usize, q: usize) -> Option<(usize, usize)> {
        let (cp, cq) = (&self.own.cells()[p], &self.own.cells()[q]);
        if p == q {
            (cp.len() > 1).then(|| (cp[0], cp[1]))
        } else {
            Some((cp[0], cq[0]))
        }
    }

    /// Compatibility of signature `a` in cell `p` with `b` in cell `q`.
    pub fn compatible(&self, p: usize, a: usize, q: usize, b: usize) -> bool {
        match self.pair_indices(p, q) {
            None => true,
            Some((j, k)) => pair_compatible(
                &self.other,
                &self.sigs[p][a].sums,
                &self.sigs[q][b].sums,
                self.gram.get(j, k) as i64,
                self.square.get(j, k) as i64,
            ),
        }
    }

    /// Compatibility tables `table[p][q][a]` listing the `b` compatible with
    /// `a`, over all signatures (alive or not).
    pub fn compat_tables(&self) -> Vec<Vec<Vec<Vec<bool>>>> {
        let t = self.own.len();
        let mut out = vec![vec![Vec::new(); t]; t];
        for p in 0..t {
            for q in 0..t {
                out[p][q] = (0..self.sigs[p].len())
                    .map(|a| (0..self.sigs[q].len()).map(|b| self.compatible(p, a, q, b)).collect())
                    .collect();
            }
        }
        out
    }

    /// Whether signature `a` of cell `p` has a compatible alive partner in
    /// cell `q` (vacuous when `q = p` is a singleton).
    pub fn has_partner(&self, p: usize, a: usize, q: usize) -> bool {
        self.pair_indices(p, q).is_none() || (0..self.sigs[q].len()).any(|b| self.alive[q][b] && self.compatible(p, a, q, b))
    }

    /// Removes signatures lacking a compatible partner in some cell (its own
    /// cell included when that has another member), to a fixpoint. Returns
    /// the removals `(cell, signature, partner cell)` in order.
    pub fn pairwise_filter(&mut self) -> Vec<(usize, usize, usize)> {
        let tables = self.compat_tables();
        let t = self.own.len();
        let mut removed = Vec::new();
        loop {
            let mut changed = false;
            for p in 0..t {
                for a in 0..self.sigs[p].len() {
                    if !self.alive[p][a] {
                        continue;
                    }
                    let bad = (0..t).find(|&q| {
                        self.pair_indices(p, q).is_some()
                            && !(0..self.sigs[q].len()).any(|b| self.alive[q][b] && tables[p][q][a][b])
                    });
                    if let Some(q) = bad {
                        self.alive[p][a] = false;
                        removed.push((p, a, q));
                        changed = true;
                    }
                }
            }
            if !changed {
                return removed;
            }
        }
    }
}

/// Allowed values of the entry `x_jk` of the factor, for a row signature `s`
/// (row `j` in row cell `p`) and column signature `t` (column `k` in column
/// cell `q`), from `M_r R = R M_c`: bit 0 for +1, bit 1 for −1.
pub fn entry_mask(rows: &CellStructure, cols: &CellStructure, p: usize, q: usize, s: &[i64], t: &[i64]) -> u8 {
    // (w_r(p) − w_c(q))·x = Σ_u α^c_{uq} s_u − Σ_v α^r_{pv} t_v
    let lhs: i64 = (0..cols.len()).map(|u| cols.alpha(u, q) * s[u]).sum();
    let rhs: i64 = (0..rows.len()).map(|v| rows.alpha(p, v) * t[v]).sum();
    let delta = lhs - rhs;
    let w = rows.weight(p) - cols.weight(q);
    if w == 0 {
        if delta == 0 {
            3
        } else {
            0
        }
    } else if delta == w {
        1
    } else if delta == -w {
        2
    } else {
        0
    }
}

/// Which side of the factor a signature describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Row,
    Column,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "cell")]
pub enum Reason {
    /// No compatible signature left for the pair constraint with this cell.
    Pairwise(usize),
    /// The entry constraints against this cell of the other side fail.
    Entries(usize),
}

/// One signature removed by a filter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub side: Side,
    pub cell: usize,
    pub signature: BlockSignature,
    #[serde(skip)]
    pub index: usize,
    pub reason: Reason,
}

/// Row and column domains linked through the entry masks.
#[derive(Clone, Debug)]
pub struct Domains {
    pub rows: SideDomains,
    pub cols: SideDomains,
    /// Removals in the order they happened.
    pub log: Vec<Elimination>,
}

impl Domains {
    pub fn new(m_r: &IntMatrix, m_c: &IntMatrix) -> crate::Result<Self> {
        Ok(Domains {
            rows: SideDomains::new(m_r, m_c)?,
            cols: SideDomains::new(m_c, m_r)?,
            log: Vec::new(),
        })
    }

    pub fn side(&self, side: Side) -> &SideDomains {
        match side {
            Side::Row => &self.rows,
            Side::Column => &self.cols,
        }
    }

    fn side_mut(&mut self, side: Side) -> &mut SideDomains {
        match side {
            Side::Row => &mut self.rows,
            Side::Column => &mut self.cols,
        }
    }

    pub fn is_wiped_out(&self) -> bool {
        self.rows.is_wiped_out() || self.cols.is_wiped_out()
    }

    pub fn mask(&self, p: usize, a: usize, q: usize, b: usize) -> u8 {
        entry_mask(
            &self.rows.own,
            &self.cols.own,
            p,
            q,
            &self.rows.sigs[p][a].sums,
            &self.cols.sigs[q][b].sums,
        )
    }

    /// Whether signature `a` of cell `p` on `side` can meet its sum over
    /// cell `q` of the other side with the entries the alive signatures
    /// there allow.
    pub fn entries_supported(&self, side: Side, p: usize, a: usize, q: usize) -> bool {
        let (mine, theirs) = match side {
            Side::Row => (&self.rows, &self.cols),
            Side::Column => (&self.cols, &self.rows),
        };
        let mut union = 0u8;
        for b in 0..theirs.sigs[q].len() {
            if theirs.alive[q][b] {
                union |= match side {
                    Side::Row => self.mask(p, a, q, b),
                    Side::Column => self.mask(q, b, p, a),
                };
            }
        }
        let c = theirs.own.size(q) as i64;
        let want = mine.sigs[p][a].sums[q];
        match union {
            0 => false,
            1 => want == c,
            2 => want == -c,
            _ => true,
        }
    }

    /// Removes row (column) signatures for which some column (row) cell
    /// offers no entries consistent with the required sum, to a fixpoint.
    pub fn row_col_filter(&mut self) -> usize {
        let mut removed = 0;
        loop {
            let mut changed = false;
            for side in [Side::Row, Side::Column] {
                let other_cells = match side {
                    Side::Row => self.cols.own.len(),
                    Side::Column => self.rows.own.len(),
                };
                for p in 0..self.side(side).own.len() {
                    for a in 0..self.side(side).sigs[p].len() {
                        if !self.side(side).alive[p][a] {
                            continue;
                        }
                        if let Some(q) = (0..other_cells).find(|&q| !self.entries_supported(side, p, a, q)) {
                            self.side_mut(side).alive[p][a] = false;
                            let signature = self.side(side).sigs[p][a].clone();
                            self.log.push(Elimination {
                                side,
                                cell: p,
                                signature,
                                index: a,
                                reason: Reason::Entries(q),
                            });
                            removed += 1;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return removed;
            }
        }
    }

    fn pairwise(&mut self, side: Side) -> usize {
        let removed = self.side_mut(side).pairwise_filter();
        for &(p, a, q) in &removed {
            let signature = self.side(side).sigs[p][a].clone();
            self.log.push(Elimination {
                side,
                cell: p,
                signature,
                index: a,
                reason: Reason::Pairwise(q),
            });
        }
        removed.len()
    }

    /// Alternates both filters until nothing changes.
    pub fn filter_to_fixpoint(&mut self) {
        loop {
            let a = self.pairwise(Side::Row) + self.pairwise(Side::Column);
            let b = self.row_col_filter();
            if a + b == 0 || self.is_wiped_out() {
                return;
            }
        }
    }

    /// Replays the log backwards, restoring each removed signature and
    /// re-checking that its recorded reason held at the time of removal.
    pub fn confirm_log(&self) -> bool {
        let mut d = self.clone();
        for e in self.log.iter().rev() {
            if d.side(e.side).sigs[e.cell][e.index] != e.signature {
                return false;
            }
            // The signature was still alive when it was checked.
            d.side_mut(e.side).alive[e.cell][e.index] = true;
            let holds = match e.reason {
                Reason::Pairwise(q) => !d.side(e.side).has_partner(e.cell, e.index, q),
                Reason::Entries(q) => !d.entries_supported(e.side, e.cell, e.index, q),
            };
            if !holds {
                return false;
            }
        }
        // Everything alive again must be the full diagonal solution set.
        d.rows.alive.iter().chain(&d.cols.alive).all(|v| v.iter().all(|a| *a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::{construct_ehlich_block, construct_s, expand_counts};

    fn sig(v: &[i64]) -> BlockSignature {
        BlockSignature { sums: v.to_vec() }
    }

    fn b4443() -> IntMatrix {
        construct_ehlich_block(15, &[4, 4, 4, 3]).unwrap().into_matrix()
    }

    #[test]
    fn order_fifteen_row_signatures() {
        let m = b4443();
        let cells = CellStructure::new(&m).unwrap();
        let sq = m.mul(&m).unwrap();
        // 263 − 180 = 83 for rows 1–12, 255 − 180 = 75 for rows 13–15.
        assert_eq!(sq.get(0, 0) - 180, 83);
        assert_eq!(sq.get(14, 14) - 180, 75);
        let first = collapse_orbits(&cells, &signature_solutions(&cells, sq.get(0, 0) as i64));
        assert_eq!(
            first,
            vec![sig(&[-4, -4, 0, 1]), sig(&[-4, -2, 2, -3]), sig(&[-2, -2, 2, 3]), sig(&[-2, 0, 4, -1])]
        );
        let last = collapse_orbits(&cells, &signature_solutions(&cells, sq.get(14, 14) as i64));
        assert_eq!(
            last,
            vec![sig(&[-4, -4, -4, 1]), sig(&[-4, 0, 2, -1]), sig(&[-2, -2, -2, 3]), sig(&[-2, 2, 4, 1])]
        );
    }

    #[test]
    fn solutions_match_enumeration() {
        let m = b4443();
        let cells = CellStructure::new(&m).unwrap();
        for rhs in [263i64, 255] {
            let mut want = std::collections::BTreeSet::new();
            for mask in 0u32..1 << 15 {
                // Parity: the number of +1 entries is even.
                if mask.count_ones() % 2 == 1 {
                    continue;
                }
                let x: Vec<i8> = (0..15).map(|k| if mask >> k & 1 == 1 { 1 } else { -1 }).collect();
                let mut q = 0i64;
                for i in 0..15 {
                    for j in 0..15 {
                        q += m.get(i, j) as i64 * x[i] as i64 * x[j] as i64;
                    }
                }
                if q == rhs {
                    want.insert(cells.sums(&x));
                }
            }
            let got: std::collections::BTreeSet<Vec<i64>> =
                signature_solutions(&cells, rhs).into_iter().map(|s| s.sums).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn order_fifteen_pairwise_fixpoint() {
        let m = b4443();
        let mut d = SideDomains::new(&m, &m).unwrap();
        d.pairwise_filter();
        // Up to a simultaneous permutation of the three interchangeable
        // column cells, two types survive per row cell.
        let two = |p: usize| collapse_orbits(&d.other, &d.alive_sigs(p));
        for p in 0..3 {
            assert_eq!(two(p), vec![sig(&[-4, -2, 2, -3]), sig(&[-2, 0, 4, -1])], "cell {p}");
            assert_eq!(d.alive_count(p), 12);
        }
        // Pairs inside the last cell already rule out (−4,−4,−4,1).
        assert_eq!(two(3), vec![sig(&[-2, -2, -2, 3])]);
    }

    #[test]
    fn inner_product_ranges() {
        // Brute force over all pairs of length-4 vectors.
        for s in [-4i64, -2, 0, 2, 4] {
            for t in [-4i64, -2, 0, 2, 4] {
                let mut seen = Vec::new();
                for x in 0u32..16 {
                    for y in 0u32..16 {
                        let sx = 2 * x.count_ones() as i64 - 4;
                        let sy = 2 * y.count_ones() as i64 - 4;
                        if sx == s && sy == t {
                            seen.push(4 - 2 * (x ^ y).count_ones() as i64);
                        }
                    }
                }
                seen.sort_unstable();
                seen.dedup();
                let (lo, hi) = inner_product_range(4, s, t);
                let want: Vec<i64> = (0..).map(|k| lo + 4 * k).take_while(|v| *v <= hi).collect();
                assert_eq!(seen, want, "s={s} t={t}");
            }
        }
    }

    #[test]
    fn order_seventeen_cross_pair_rows() {
        let mr = construct_s(17, &expand_counts(&[(5, 2), (-3, 2), (1, 12)])).unwrap().into_matrix();
        let mc = construct_s(17, &expand_counts(&[(-3, 8), (1, 8)])).unwrap().into_matrix();
        let d = SideDomains::new(&mr, &mc).unwrap();
        assert_eq!(d.other.sizes(), vec![1, 8, 8]);
        assert_eq!(d.sigs[0], vec![sig(&[1, -2, -8]), sig(&[-1, 6, 2])]);
        let mut rows23 = d.sigs[1].clone();
        rows23.sort();
        assert_eq!(
            rows23,
            vec![sig(&[-1, 4, -8]), sig(&[-1, 6, -2]), sig(&[1, -6, 8]), sig(&[1, -4, -2]), sig(&[1, 8, 2])]
        );
        for a in 0..2 {
            for b in 0..5 {
                assert!(!d.compatible(0, a, 1, b));
            }
        }
    }
}
