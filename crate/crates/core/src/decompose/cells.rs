//! Twin classes of a symmetric matrix and the quadratic forms they induce.
//!
//! Indices `i` and `j` are twins when the transposition `(ij)` is an
//! automorphism, that is rows `i` and `j` agree outside positions `i`, `j`.
//! Twin classes form an equitable partition with constant entries between
//! and within classes, so `xᵀMx` and `xᵀMy` depend only on the class sums
//! of `x` and `y` (and, for `xᵀMy`, on the per-class inner products).

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellStructure {
    diag: i64,
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
    /// Constant entry between cells; zero on the diagonal for singletons.
    alpha: Vec<Vec<i64>>,
}

fn twins(m: &IntMatrix, i: usize, j: usize) -> bool {
    (0..m.order()).all(|k| k == i || k == j || m.get(i, k) == m.get(j, k))
}

impl CellStructure {
    pub fn new(m: &IntMatrix) -> Result<Self> {
        if !m.is_square() || !m.is_symmetric() {
            return Err(Error::InvalidArgument("cell structure needs a symmetric matrix".into()));
        }
        let n = m.order();
        if n == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let diag = m.get(0, 0);
        if (0..n).any(|i| m.get(i, i) != diag) {
            return Err(Error::InvalidArgument("diagonal is not constant".into()));
        }
        let mut cell_of = vec![usize::MAX; n];
        let mut cells: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            if cell_of[i] != usize::MAX {
                continue;
            }
            let id = cells.len();
            let mut c = vec![i];
            cell_of[i] = id;
            for j in i + 1..n {
                if cell_of[j] == usize::MAX && twins(m, i, j) {
                    cell_of[j] = id;
                    c.push(j);
                }
            }
            cells.push(c);
        }
        let t = cells.len();
        let mut alpha = vec![vec![0i64; t]; t];
        for p in 0..t {
            for q in 0..t {
                let (i, j) = (cells[p][0], cells[q][0]);
                alpha[p][q] = if p != q {
                    m.get(i, j) as i64
                } else if cells[p].len() > 1 {
                    m.get(cells[p][0], cells[p][1]) as i64
                } else {
                    0
                };
            }
        }
        Ok(CellStructure {
            diag: diag as i64,
            cells,
            cell_of,
            alpha,
        })
    }

    pub fn order(&self) -> usize {
        self.cell_of.len()
    }

    pub fn diag(&self) -> i64 {
        self.diag
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell_of(&self, i: usize) -> usize {
        self.cell_of[i]
    }

    pub fn size(&self, p: usize) -> usize {
        self.cells[p].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.len()).collect()
    }

    pub fn alpha(&self, p: usize, q: usize) -> i64 {
        self.alpha[p][q]
    }

    /// Coefficient of the within-cell inner product in `xᵀMy`.
    pub fn weight(&self, p: usize) -> i64 {
        self.diag - self.alpha[p][p]
    }

    /// `Σ_{p,q} α_pq s_p t_q`.
    pub fn bilinear(&self, s: &[i64], t: &[i64]) -> i64 {
        let mut acc = 0;
        for (p, &sp) in s.iter().enumerate() {
            if sp == 0 {
                continue;
            }
            for (q, &tq) in t.iter().enumerate() {
                acc += self.alpha[p][q] * sp * tq;
            }
        }
        acc
    }

    /// `xᵀMx` for any ±1 vector with class sums `s`.
    pub fn quad(&self, s: &[i64]) -> i64 {
        let base: i64 = (0..self.len()).map(|p| self.weight(p) * self.size(p) as i64).sum();
        base + self.bilinear(s, s)
    }

    /// Class sums of a ±1 vector.
    pub fn sums(&self, x: &[i8]) -> Vec<i64> {
        let mut s = vec![0i64; self.len()];
        for (i, &v) in x.iter().enumerate() {
            s[self.cell_of[i]] += v as i64;
        }
        s
    }

    /// Classes of cells that can be permuted among themselves without
    /// changing the cell-level matrix.
    pub fn interchangeable(&self) -> Vec<Vec<usize>> {
        let t = self.len();
        let same = |p: usize, q: usize| {
            self.size(p) == self.size(q)
                && self.alpha[p][p] == self.alpha[q][q]
                && (0..t).all(|r| r == p || r == q || self.alpha[p][r] == self.alpha[q][r])
        };
        let mut group = vec![usize::MAX; t];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for p in 0..t {
            if group[p] != usize::MAX {
                continue;
            }
            group[p] = out.len();
            let mut g = vec![p];
            for q in p + 1..t {
                if group[q] == usize::MAX && same(p, q) {
                    group[q] = out.len();
                    g.push(q);
                }
            }
            out.push(g);
        }
        out
    }
}
