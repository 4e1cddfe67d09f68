//! Signature assignment and entry-level search for a factor `R` with
//! `RRᵀ = M_r` and `RᵀR = M_c`.
//!
//! Rows sharing a twin cell of `M_r` are interchangeable, as are columns
//! sharing a twin cell of `M_c`. Signatures are therefore assigned in
//! nondecreasing order along each cell, and within a run of equal
//! signatures rows (columns) are kept in nonincreasing lexicographic order.
//! Sorting rows and sorting columns both increase the row-major reading of
//! the matrix, so every witness has a representative meeting both orders.

use super::signature::Domains;
use crate::linalg::SignMatrix;

type Table<T> = Vec<Vec<Vec<Vec<T>>>>;

pub(crate) struct FillStats {
    pub assignments: u64,
    pub nodes: u64,
    pub exhausted: bool,
}

pub(crate) struct Search<'a> {
    d: &'a Domains,
    n: usize,
    mr: Vec<i64>,
    mc: Vec<i64>,
    rcell: Vec<usize>,
    ccell: Vec<usize>,
    rdom: Vec<Vec<usize>>,
    cdom: Vec<Vec<usize>>,
    rtab: Table<bool>,
    ctab: Table<bool>,
    masks: Table<u8>,
    budget: u64,
    max_witnesses: usize,
    pub stats: FillStats,
    pub witnesses: Vec<SignMatrix>,
    stop: bool,

    sigma: Vec<usize>,
    tau: Vec<usize>,
    // Column stage: achievable entry sums per (row, column cell).
    rlo: Vec<i64>,
    rhi: Vec<i64>,
    cassigned: Vec<usize>,

    // Entry stage.
    x: Vec<i8>,
    mask: Vec<u8>,
    row_prev: Vec<Option<usize>>,
    col_prev: Vec<Option<usize>>,
    col_tie: Vec<bool>,
    cip: Vec<i64>,
    colsum: Vec<i64>,
    rows_after: Vec<usize>,
}

fn prev_in_cell(cells: &[Vec<usize>], n: usize) -> Vec<Option<usize>> {
    let mut prev = vec![None; n];
    for c in cells {
        for w in c.windows(2) {
            prev[w[1]] = Some(w[0]);
        }
    }
    prev
}

impl<'a> Search<'a> {
    pub fn new(d: &'a Domains, budget: u64, max_witnesses: usize) -> Self {
        let n = d.rows.gram.order();
        let (rt, ct) = (d.rows.own.len(), d.cols.own.len());
        let alive = |s: &super::signature::SideDomains| -> Vec<Vec<usize>> {
            s.alive.iter().map(|v| (0..v.len()).filter(|&a| v[a]).collect()).collect()
        };
        let mut masks: Table<u8> = vec![vec![Vec::new(); ct]; rt];
        for (p, row) in masks.iter_mut().enumerate() {
            for (q, m) in row.iter_mut().enumerate() {
                *m = (0..d.rows.sigs[p].len())
                    .map(|a| (0..d.cols.sigs[q].len()).map(|b| d.mask(p, a, q, b)).collect())
                    .collect();
            }
        }
        let flat = |m: &crate::linalg::IntMatrix| m.entries().iter().map(|&v| v as i64).collect::<Vec<_>>();
        Search {
            d,
            n,
            mr: flat(&d.rows.gram),
            mc: flat(&d.cols.gram),
            rcell: (0..n).map(|i| d.rows.own.cell_of(i)).collect(),
            ccell: (0..n).map(|i| d.cols.own.cell_of(i)).collect(),
            rdom: alive(&d.rows),
            cdom: alive(&d.cols),
            rtab: d.rows.compat_tables(),
            ctab: d.cols.compat_tables(),
            masks,
            budget,
            max_witnesses,
            stats: FillStats {
                assignments: 0,
                nodes: 0,
                exhausted: false,
            },
            witnesses: Vec::new(),
            stop: false,
            sigma: vec![0; n],
            tau: vec![0; n],
            rlo: vec![0; n * ct],
            rhi: vec![0; n * ct],
            cassigned: vec![0; ct],
            x: vec![0; n * n],
            mask: vec![0; n * n],
            row_prev: vec![None; n],
            col_prev: vec![None; n],
            col_tie: vec![true; n],
            cip: vec![0; n * n],
            colsum: vec![0; n * rt],
            rows_after: vec![0; n],
        }
    }

    fn tick(&mut self) -> bool {
        self.stats.nodes += 1;
        if self.stats.nodes > self.budget {
            self.stats.exhausted = true;
            self.stop = true;
        }
        !self.stop
    }

    pub fn run(&mut self) {
        self.assign_row(0);
    }

    fn assign_row(&mut self, j: usize) {
        if self.stop {
            return;
        }
        if j == self.n {
            self.assign_col(0);
            return;
        }
        let p = self.rcell[j];
        let prev = self.d.rows.own.cells()[p].iter().rev().find(|&&i| i < j).copied();
        let floor = prev.map_or(0, |i| self.sigma[i]);
        for ai in 0..self.rdom[p].len() {
            let a = self.rdom[p][ai];
            if a < floor {
                continue;
            }
            if !self.tick() {
                return;
            }
            if (0..j).all(|i| self.rtab[self.rcell[i]][p][self.sigma[i]][a]) {
                self.sigma[j] = a;
                self.assign_row(j + 1);
                if self.stop {
                    return;
                }
            }
        }
    }

    fn assign_col(&mut self, k: usize) {
        if self.stop {
            return;
        }
        if k == self.n {
            self.stats.assignments += 1;
            self.start_fill();
            return;
        }
        let n = self.n;
        let ct = self.d.cols.own.len();
        let q = self.ccell[k];
        let qsize = self.d.cols.own.size(q) as i64;
        let prev = self.d.cols.own.cells()[q].iter().rev().find(|&&i| i < k).copied();
        let floor = prev.map_or(0, |i| self.tau[i]);
        for bi in 0..self.cdom[q].len() {
            let b = self.cdom[q][bi];
            if b < floor {
                continue;
            }
            if !self.tick() {
                return;
            }
            if !(0..k).all(|l| self.ctab[self.ccell[l]][q][self.tau[l]][b]) {
                continue;
            }
            let tsums = &self.d.cols.sigs[q][b].sums;
            // Entry masks against every row, and column sums per row cell.
            let rt = self.d.rows.own.len();
            let mut clo = vec![0i64; rt];
            let mut chi = vec![0i64; rt];
            let mut ok = true;
            for j in 0..n {
                let m = self.masks[self.rcell[j]][q][self.sigma[j]][b];
                let (lo, hi) = match m {
                    0 => {
                        ok = false;
                        break;
                    }
                    1 => (1, 1),
                    2 => (-1, -1),
                    _ => (-1, 1),
                };
                clo[self.rcell[j]] += lo;
                chi[self.rcell[j]] += hi;
                let idx = j * ct + q;
                let rem = qsize - self.cassigned[q] as i64 - 1;
                let want = self.d.rows.sigs[self.rcell[j]][self.sigma[j]].sums[q];
                let (nlo, nhi) = (self.rlo[idx] + lo, self.rhi[idx] + hi);
                if want < nlo - rem || want > nhi + rem {
                    ok = false;
                    break;
                }
            }
            if !ok || (0..rt).any(|p| tsums[p] < clo[p] || tsums[p] > chi[p]) {
                continue;
            }
            for j in 0..n {
                let (lo, hi) = match self.masks[self.rcell[j]][q][self.sigma[j]][b] {
                    1 => (1, 1),
                    2 => (-1, -1),
                    _ => (-1, 1),
                };
                self.rlo[j * ct + q] += lo;
                self.rhi[j * ct + q] += hi;
            }
            self.cassigned[q] += 1;
            self.tau[k] = b;
            self.assign_col(k + 1);
            self.cassigned[q] -= 1;
            for j in 0..n {
                let (lo, hi) = match self.masks[self.rcell[j]][q][self.sigma[j]][b] {
                    1 => (1, 1),
                    2 => (-1, -1),
                    _ => (-1, 1),
                };
                self.rlo[j * ct + q] -= lo;
                self.rhi[j * ct + q] -= hi;
            }
            if self.stop {
                return;
            }
        }
    }

    fn start_fill(&mut self) {
        let n = self.n;
        for j in 0..n {
            for k in 0..n {
                self.mask[j * n + k] = self.masks[self.rcell[j]][self.ccell[k]][self.sigma[j]][self.tau[k]];
            }
        }
        let rp = prev_in_cell(self.d.rows.own.cells(), n);
        let cp = prev_in_cell(self.d.cols.own.cells(), n);
        for j in 0..n {
            self.row_prev[j] = rp[j].filter(|&i| self.sigma[i] == self.sigma[j]);
            self.col_prev[j] = cp[j].filter(|&i| self.tau[i] == self.tau[j]);
            let cell = &self.d.rows.own.cells()[self.rcell[j]];
            self.rows_after[j] = cell.iter().filter(|&&i| i > j).count();
        }
        self.col_tie.iter_mut().for_each(|t| *t = true);
        self.cip.iter_mut().for_each(|v| *v = 0);
        self.colsum.iter_mut().for_each(|v| *v = 0);
        self.x.iter_mut().for_each(|v| *v = 0);
        self.fill_row(0);
    }

    fn fill_row(&mut self, j: usize) {
        if self.stop {
            return;
        }
        let n = self.n;
        if j == n {
            self.record();
            return;
        }
        let ct = self.d.cols.own.len();
        let sig = self.d.rows.sigs[self.rcell[j]][self.sigma[j]].sums.clone();
        let mut need = sig;
        let mut rem: Vec<i64> = (0..ct).map(|q| self.d.cols.own.size(q) as i64).collect();
        let mut ip = vec![0i64; j];
        self.fill_pos(j, 0, &mut need, &mut rem, &mut ip, true);
    }

    fn fill_pos(&mut self, j: usize, k: usize, need: &mut [i64], rem: &mut [i64], ip: &mut [i64], eq: bool) {
        let n = self.n;
        if k == n {
            self.finish_row(j);
            return;
        }
        let q = self.ccell[k];
        let p = self.rcell[j];
        let rt = self.d.rows.own.len();
        let m = self.mask[j * n + k];
        for v in [1i8, -1] {
            if m & if v == 1 { 1 } else { 2 } == 0 {
                continue;
            }
            let vi = v as i64;
            if (need[q] - vi).abs() > rem[q] - 1 {
                continue;
            }
            let mut still_eq = eq;
            if let Some(i) = self.row_prev[j] {
                if eq {
                    let above = self.x[i * n + k];
                    if v > above {
                        continue;
                    }
                    still_eq = v == above;
                }
            }
            if let Some(l) = self.col_prev[k] {
                if self.col_tie[k] && self.x[j * n + l] < v {
                    continue;
                }
            }
            let want = self.d.cols.sigs[q][self.tau[k]].sums[p];
            let cs = self.colsum[k * rt + p] + vi;
            if (want - cs).abs() > self.rows_after[j] as i64 {
                continue;
            }
            let left = (n - k - 1) as i64;
            if (0..j).any(|i| (self.mr[i * n + j] - ip[i] - vi * self.x[i * n + k] as i64).abs() > left) {
                continue;
            }
            if !self.tick() {
                return;
            }
            for (i, slot) in ip.iter_mut().enumerate() {
                *slot += vi * self.x[i * n + k] as i64;
            }
            need[q] -= vi;
            rem[q] -= 1;
            self.colsum[k * rt + p] += vi;
            self.x[j * n + k] = v;
            self.fill_pos(j, k + 1, need, rem, ip, still_eq);
            self.x[j * n + k] = 0;
            self.colsum[k * rt + p] -= vi;
            need[q] += vi;
            rem[q] += 1;
            for (i, slot) in ip.iter_mut().enumerate() {
                *slot -= vi * self.x[i * n + k] as i64;
            }
            if self.stop {
                return;
            }
        }
    }

    fn finish_row(&mut self, j: usize) {
        let n = self.n;
        let left = (n - j - 1) as i64;
        let row: Vec<i8> = self.x[j * n..(j + 1) * n].to_vec();
        for k in 0..n {
            for l in k + 1..n {
                let v = self.cip[k * n + l] + (row[k] * row[l]) as i64;
                if (self.mc[k * n + l] - v).abs() > left {
                    return;
                }
            }
        }
        for k in 0..n {
            for l in k + 1..n {
                self.cip[k * n + l] += (row[k] * row[l]) as i64;
            }
        }
        let ties = self.col_tie.clone();
        for k in 0..n {
            if let Some(l) = self.col_prev[k] {
                self.col_tie[k] = self.col_tie[k] && row[k] == row[l];
            }
        }
        self.fill_row(j + 1);
        self.col_tie = ties;
        for k in 0..n {
            for l in k + 1..n {
                self.cip[k * n + l] -= (row[k] * row[l]) as i64;
            }
        }
    }

    fn record(&mut self) {
        let r = SignMatrix::new(self.n, self.x.clone()).expect("filled matrix");
        debug_assert!(crate::linalg::gram_rows(&r) == self.d.rows.gram);
        debug_assert!(crate::linalg::gram_cols(&r) == self.d.cols.gram);
        self.witnesses.push(r);
        if self.witnesses.len() >= self.max_witnesses {
            self.stop = true;
        }
    }
}
