//! Depth-first enumeration of lexicographically maximal candidate Gram
//! matrices, one bordered row at a time.
//!
//! A node holds the leading `r × r` matrix `M_r` together with its exact
//! determinant `D` and adjugate `A`. For a new row prefix `f` the child
//! determinant is `δ = n·D − fᵀAf`, and for a bordering vector
//! `γ = (γ', e)` of the child,
//!
//! ```text
//! D · det [[M_{r+1}, γ], [γᵀ, 1]] = δ·(D − γ'ᵀAγ') − (fᵀAγ' − e·D)²
//! ```
//!
//! so every quantity needed for pruning comes from the parent's adjugate.
//! The child adjugate is `[[(δA + wwᵀ)/D, −w], [−wᵀ, D]]` with `w = Af`.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::bound::search_bound_coefficients;
use super::num::{SearchInt, Wide};
use super::{BoundMode, SearchStats};
use crate::gram::{abs_lex_compare, is_lex_max, minimal_element, phi};
use crate::linalg::{is_perfect_square, IntMatrix};

/// A list of row prefixes of equal length, stored flat.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixList {
    pub len: usize,
    pub count: usize,
    pub data: Vec<i8>,
}

impl PrefixList {
    pub fn root() -> Self {
        PrefixList {
            len: 0,
            count: 1,
            data: Vec::new(),
        }
    }

    pub fn empty(len: usize) -> Self {
        PrefixList {
            len,
            count: 0,
            data: Vec::new(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> &[i8] {
        &self.data[i * self.len..(i + 1) * self.len]
    }

    pub fn push(&mut self, v: &[i8]) {
        debug_assert_eq!(v.len(), self.len);
        self.data.extend_from_slice(v);
        self.count += 1;
    }
}

/// Everything needed to resume the search below a node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    /// Order of the leading matrix.
    pub order: usize,
    /// Strict lower triangle of the leading matrix, row by row.
    pub lower: Vec<i8>,
    pub cap: i8,
    pub block_start: usize,
    pub prev_block: Option<(usize, usize)>,
    pub block_equal: bool,
    /// Accepted prefixes of the level that produced this node.
    pub accepted: PrefixList,
}

/// A matrix that passed every test at the leaf.
#[derive(Clone, Debug)]
pub struct Found {
    pub matrix: IntMatrix,
    pub det: BigInt,
}

pub(crate) struct Shared<'a> {
    pub budget: Option<u64>,
    pub nodes: &'a AtomicU64,
    pub abort: &'a AtomicBool,
}

struct Node<T> {
    r: usize,
    det: T,
    adj: Vec<T>,
    cap: i8,
    block_start: usize,
    prev_block: Option<(usize, usize)>,
    block_equal: bool,
}

/// One element of the extension list of a node.
struct Ext<T> {
    /// Offset of the prefix in the flat `prefixes` buffer.
    at: usize,
    /// `fᵀ A f`.
    q: T,
    all_min: bool,
}

pub(crate) struct Engine<'s, T: SearchInt> {
    n: usize,
    nn: i64,
    minimal: i8,
    phi: Vec<i8>,
    thr: T::W,
    p_coef: Vec<T::W>,
    c_coef: Vec<T::W>,
    fischer: Vec<T::W>,
    mode: BoundMode,
    /// Symmetric `n × n` working matrix; rows below the current order are stale.
    mat: Vec<i8>,
    pub stats: SearchStats,
    pub found: Vec<Found>,
    frontier_order: Option<usize>,
    pub frontier: Vec<Snapshot>,
    shared: Shared<'s>,
    local_nodes: u64,
}

impl<'s, T: SearchInt> Engine<'s, T> {
    pub fn new(n: usize, thr: &BigInt, mode: BoundMode, frontier_order: Option<usize>, shared: Shared<'s>) -> Self {
        let mut p_coef = vec![T::W::zero(); n + 1];
        let mut c_coef = vec![T::W::zero(); n + 1];
        let mut fischer = vec![T::W::zero(); n + 1];
        for m in 1..n {
            let (p, c) = search_bound_coefficients(n, m);
            p_coef[m] = T::W::from_big(&p);
            c_coef[m] = T::W::from_big(&c);
            fischer[m] = T::W::from_big(&num_traits::pow(BigInt::from(n), n - m));
        }
        Engine {
            n,
            nn: n as i64,
            minimal: minimal_element(n) as i8,
            phi: phi(n).into_iter().map(|v| v as i8).collect(),
            thr: T::W::from_big(thr),
            p_coef,
            c_coef,
            fischer,
            mode,
            mat: vec![0; n * n],
            stats: SearchStats::new(n),
            found: Vec::new(),
            frontier_order,
            frontier: Vec::new(),
            shared,
            local_nodes: 0,
        }
    }

    #[inline]
    fn set_row(&mut self, r: usize, f: &[i8]) {
        let n = self.n;
        for (j, &v) in f.iter().enumerate() {
            self.mat[r * n + j] = v;
            self.mat[j * n + r] = v;
        }
        self.mat[r * n + r] = self.n as i8;
    }

    fn block_matrix(&self, start: usize, end: usize) -> IntMatrix {
        let n = self.n;
        IntMatrix::from_fn(end - start, end - start, |i, j| self.mat[(start + i) * n + start + j] as i128)
    }

    fn full_matrix(&self) -> IntMatrix {
        let n = self.n;
        IntMatrix::from_fn(n, n, |i, j| self.mat[i * n + j] as i128)
    }

    fn root(&mut self) -> Node<T> {
        let n = self.n;
        self.mat[0] = n as i8;
        Node {
            r: 1,
            det: T::from_i64(n as i64),
            adj: vec![T::from_i64(1)],
            cap: (n as i8) - 2,
            block_start: 0,
            prev_block: None,
            block_equal: true,
        }
    }

    /// Runs the whole tree from the root.
    pub fn run_root(&mut self) {
        if self.n == 1 {
            self.emit_leaf_det(T::from_i64(1));
            return;
        }
        let root = self.root();
        self.expand(&root, &PrefixList::root());
    }

    /// Rebuilds a node from a snapshot and explores its subtree.
    pub fn run_snapshot(&mut self, snap: &Snapshot) {
        let n = self.n;
        let r = snap.order;
        let mut t = 0;
        for i in 0..r {
            self.mat[i * n + i] = n as i8;
            for j in 0..i {
                self.mat[i * n + j] = snap.lower[t];
                self.mat[j * n + i] = snap.lower[t];
                t += 1;
            }
        }
        let mut det = T::from_i64(n as i64);
        let mut adj = vec![T::from_i64(1)];
        for k in 1..r {
            let f: Vec<i8> = (0..k).map(|j| self.mat[k * n + j]).collect();
            let (w, delta) = self.border(&adj, &det, k, &f);
            adj = self.child_adj(&adj, &det, &delta, &w, k);
            det = delta;
        }
        let node = Node {
            r,
            det,
            adj,
            cap: snap.cap,
            block_start: snap.block_start,
            prev_block: snap.prev_block,
            block_equal: snap.block_equal,
        };
        self.expand(&node, &snap.accepted);
    }

    /// `(A f, n·D − fᵀ A f)` for an order-`k` parent.
    fn border(&self, adj: &[T], det: &T, k: usize, f: &[i8]) -> (Vec<T>, T) {
        let w: Vec<T> = (0..k)
            .map(|i| {
                let row = &adj[i * k..(i + 1) * k];
                let mut s = T::from_i64(0);
                for (a, &x) in row.iter().zip(f) {
                    if x != 0 {
                        s = s.add(&a.mul_small(x as i64));
                    }
                }
                s
            })
            .collect();
        let mut q = T::from_i64(0);
        for (wi, &x) in w.iter().zip(f) {
            q = q.add(&wi.mul_small(x as i64));
        }
        (w, det.mul_small(self.nn).sub(&q))
    }

    fn child_adj(&self, adj: &[T], det: &T, delta: &T, w: &[T], k: usize) -> Vec<T> {
        let m = k + 1;
        let mut out = vec![T::from_i64(0); m * m];
        let dw = det.widen();
        for i in 0..k {
            for j in 0..=i {
                let num = delta.wmul(&adj[i * k + j]) + w[i].wmul(&w[j]);
                let v = T::narrow(&(num / dw.clone()));
                out[i * m + j] = v.clone();
                out[j * m + i] = v;
            }
            let neg = T::from_i64(0).sub(&w[i]);
            out[i * m + k] = neg.clone();
            out[k * m + i] = neg;
        }
        out[k * m + k] = det.clone();
        out
    }

    fn over_budget(&mut self) -> bool {
        self.local_nodes += 1;
        if self.local_nodes >= 4096 {
            let total = self.shared.nodes.fetch_add(self.local_nodes, AtomicOrdering::Relaxed) + self.local_nodes;
            self.local_nodes = 0;
            if let Some(b) = self.shared.budget {
                if total > b {
                    self.shared.abort.store(true, AtomicOrdering::Relaxed);
                }
            }
        }
        self.shared.abort.load(AtomicOrdering::Relaxed)
    }

    pub fn flush_nodes(&mut self) {
        self.shared.nodes.fetch_add(self.local_nodes, AtomicOrdering::Relaxed);
        self.local_nodes = 0;
    }

    /// Block-order test for a row continuing the active block.
    /// Returns the new `block_equal` flag, or `None` when the active block
    /// would exceed its predecessor.
    fn block_order(&self, node: &Node<T>, f: &[i8]) -> Option<bool> {
        let r = node.r;
        let Some((ps, pl)) = node.prev_block else {
            return Some(false);
        };
        if !node.block_equal {
            return Some(false);
        }
        let k = r - node.block_start;
        if k >= pl {
            return None;
        }
        let prev_row = &self.mat[(ps + k) * self.n + ps..(ps + k) * self.n + ps + k];
        match abs_lex_compare(&f[node.block_start..r], prev_row) {
            Ordering::Greater => None,
            Ordering::Less => Some(false),
            Ordering::Equal => Some(true),
        }
    }

    fn expand(&mut self, node: &Node<T>, accepted: &PrefixList) {
        let r = node.r;
        let m = r + 1;
        let n = self.n;
        let caps: Vec<i8> = self.phi.iter().copied().filter(|e| e.abs() <= node.cap).collect();
        let kk = caps.len();

        // Extension list in ascending abs-lex order with fᵀAf and Af.
        let mut prefixes: Vec<i8> = Vec::with_capacity(accepted.count * kk * r);
        let mut us: Vec<T> = Vec::with_capacity(accepted.count * kk * r);
        let mut exts: Vec<Ext<T>> = Vec::with_capacity(accepted.count * kk);
        let nd = node.det.mul_small(self.nn);
        let last_col: Vec<T> = (0..r).map(|i| node.adj[i * r + r - 1].clone()).collect();
        for gi in 0..accepted.count {
            let g = accepted.get(gi);
            let g_min = g.iter().all(|&x| x == self.minimal);
            // A[:, ..r−1] g
            let ag: Vec<T> = (0..r)
                .map(|i| {
                    let row = &node.adj[i * r..i * r + r - 1];
                    let mut s = T::from_i64(0);
                    for (a, &x) in row.iter().zip(g) {
                        s = s.add(&a.mul_small(x as i64));
                    }
                    s
                })
                .collect();
            for &e in &caps {
                let u: Vec<T> = ag.iter().zip(&last_col).map(|(a, c)| a.add(&c.mul_small(e as i64))).collect();
                let mut q = T::from_i64(0);
                for (ui, &x) in u.iter().zip(g.iter().chain(std::iter::once(&e))) {
                    q = q.add(&ui.mul_small(x as i64));
                }
                if !nd.sub(&q).is_positive() {
                    continue;
                }
                let at = prefixes.len();
                prefixes.extend_from_slice(g);
                prefixes.push(e);
                us.extend(u);
                exts.push(Ext {
                    at,
                    q,
                    all_min: g_min && e == self.minimal,
                });
            }
        }

        // Bordering candidates γ' with D − γ'ᵀAγ' > 0, largest first.
        let scan: Vec<(T, usize)> = if m < n && self.mode == BoundMode::Theorem {
            let mut v: Vec<(T, usize)> = exts
                .iter()
                .filter_map(|x| {
                    let dq = node.det.sub(&x.q);
                    dq.is_positive().then_some((dq, x.at))
                })
                .collect();
            v.sort_by(|a, b| b.0.cmp(&a.0));
            v
        } else {
            Vec::new()
        };

        let mut acc = PrefixList::empty(r);
        for x in &exts {
            if self.over_budget() {
                return;
            }
            let f = &prefixes[x.at..x.at + r];
            let delta = nd.sub(&x.q);
            self.stats.nodes[m] += 1;

            if m == n {
                self.leaf(node, f, x.all_min, delta);
                continue;
            }

            if !self.keep(node, m, f, &delta, &scan, &us, &caps) {
                self.stats.pruned_bound += 1;
                continue;
            }
            acc.push(f);

            if x.all_min && node.block_start + 1 == r {
                self.stats.fast_paths += 1;
                self.fast_path(node, f, delta, &us[x.at..x.at + r]);
                continue;
            }

            let (block_start, prev_block, block_equal, cap) = if x.all_min {
                (r, Some((node.block_start, r - node.block_start)), true, node.cap)
            } else {
                let Some(eq) = self.block_order(node, f) else {
                    self.stats.rejected_block_order += 1;
                    continue;
                };
                let cap = if node.block_start + 1 == r { f[r - 1].abs() } else { node.cap };
                (node.block_start, node.prev_block, eq, cap)
            };
            self.set_row(r, f);
            if m - block_start >= 3 && !is_lex_max(&self.block_matrix(block_start, m)) {
                self.stats.rejected_lex_max += 1;
                continue;
            }
            let w = &us[x.at..x.at + r];
            let child = Node {
                r: m,
                adj: self.child_adj(&node.adj, &node.det, &delta, w, r),
                det: delta,
                cap,
                block_start,
                prev_block,
                block_equal,
            };
            if self.frontier_order == Some(m) {
                self.frontier.push(Snapshot {
                    order: m,
                    lower: (0..m).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| self.mat[i * n + j]).collect(),
                    cap,
                    block_start,
                    prev_block,
                    block_equal,
                    accepted: acc.clone(),
                });
            } else {
                self.expand(&child, &acc);
            }
        }
    }

    /// The pruning test for a child of order `m < n`.
    #[allow(clippy::too_many_arguments)]
    fn keep(
        &mut self,
        node: &Node<T>,
        m: usize,
        f: &[i8],
        delta: &T,
        scan: &[(T, usize)],
        us: &[T],
        caps: &[i8],
    ) -> bool {
        match self.mode {
            BoundMode::Off => true,
            BoundMode::Fischer => delta.widen() * self.fischer[m].clone() >= self.thr,
            BoundMode::Theorem => {
                self.stats.bound_tests += 1;
                let pd = self.p_coef[m].clone() * delta.widen();
                if pd >= self.thr {
                    return true;
                }
                let c = self.c_coef[m].clone();
                let gap = self.thr.clone() - pd;
                let need = (gap.clone() + c.clone() - <T::W as Wide>::from_big(&BigInt::from(1))) / c;
                // The bordered determinant never exceeds δ.
                if need > delta.widen() {
                    return false;
                }
                let need_d = need * node.det.widen();
                let r = node.r;
                for (dq, at) in scan {
                    let slack = delta.wmul(dq) - need_d.clone();
                    if slack < <T::W as Wide>::zero() {
                        break;
                    }
                    let u = &us[*at..*at + r];
                    let mut w = T::from_i64(0);
                    for (ui, &x) in u.iter().zip(f) {
                        w = w.add(&ui.mul_small(x as i64));
                    }
                    let mut best: Option<T> = None;
                    for &e in caps {
                        let t = w.sub(&node.det.mul_small(e as i64)).abs();
                        if best.as_ref().map_or(true, |b| t < *b) {
                            best = Some(t);
                        }
                    }
                    let t = best.expect("nonempty caps");
                    if t.wmul(&t) <= slack {
                        return true;
                    }
                }
                false
            }
        }
    }

    fn leaf(&mut self, node: &Node<T>, f: &[i8], all_min: bool, delta: T) {
        self.stats.leaves += 1;
        if delta.widen() < self.thr {
            return;
        }
        let det = delta.to_big();
        if is_perfect_square(&det).expect("positive").is_none() {
            return;
        }
        let r = node.r;
        let block_start = if all_min {
            r
        } else {
            if self.block_order(node, f).is_none() {
                return;
            }
            node.block_start
        };
        self.set_row(r, f);
        if r + 1 - block_start >= 3 && !is_lex_max(&self.block_matrix(block_start, r + 1)) {
            return;
        }
        self.found.push(Found {
            matrix: self.full_matrix(),
            det,
        });
    }

    fn emit_leaf_det(&mut self, det: T) {
        if det.widen() >= self.thr {
            self.mat[0] = self.n as i8;
            self.found.push(Found {
                matrix: self.full_matrix(),
                det: det.to_big(),
            });
        }
    }

    /// Row `r` closes a singleton block and is itself all minimal, so every
    /// later row is all minimal too; fill and check directly.
    fn fast_path(&mut self, node: &Node<T>, f: &[i8], delta: T, w: &[T]) {
        let n = self.n;
        let r = node.r;
        self.set_row(r, f);
        let mut adj = self.child_adj(&node.adj, &node.det, &delta, w, r);
        let mut det = delta;
        let min_row = vec![self.minimal; n];
        for k in r + 1..n {
            let (w, d) = self.border(&adj, &det, k, &min_row[..k]);
            if !d.is_positive() {
                return;
            }
            if k + 1 < n {
                adj = self.child_adj(&adj, &det, &d, &w, k);
            }
            det = d;
            self.set_row(k, &min_row[..k]);
        }
        self.stats.leaves += 1;
        let big = det.to_big();
        if T::W::from_big(&big) < self.thr || is_perfect_square(&big).expect("positive").is_none() {
            return;
        }
        self.found.push(Found {
            matrix: self.full_matrix(),
            det: big,
        });
    }
}
