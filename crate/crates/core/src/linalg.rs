//! Exact dense integer linear algebra.
//!
//! Entries are stored as `i128`. Determinants and characteristic polynomials
//! run in checked `i128` arithmetic first and fall back to `BigInt` on
//! overflow, so results are always exact.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i128>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows of any integer type convertible to `i128`.
    pub fn from_rows<T: Copy + Into<i128>>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend(row.iter().map(|&v| v.into()));
        }
        Self::new(r, c, data)
    }

    /// Builds a matrix by evaluating `f(i, j)` at every position.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i128) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Order of a square matrix.
    pub fn order(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[i128] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<i128>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Product with overflow checking.
    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a
                        .checked_mul(other.get(k, j))
                        .and_then(|p| p.checked_add(out.get(i, j)))
                        .ok_or_else(|| Error::InvalidEntry("product overflows i128".into()))?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn scale_add_identity(&self, scale: i128, shift: i128) -> IntMatrix {
        let mut m = self.clone();
        for v in &mut m.data {
            *v *= scale;
        }
        for i in 0..self.rows.min(self.cols) {
            let d = m.get(i, i);
            m.set(i, i, d + shift);
        }
        m
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn principal(&self, idx: &[usize]) -> IntMatrix {
        Self::from_fn(idx.len(), idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    /// Leading principal submatrix of order `k`.
    pub fn leading(&self, k: usize) -> IntMatrix {
        Self::from_fn(k, k, |i, j| self.get(i, j))
    }

    /// `P M Pᵀ` where row `a` of the result is row `perm[a]` of `self`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> IntMatrix {
        self.principal(perm)
    }

    /// Parses the text format: a `rows cols` header then one row per line.
    pub fn parse_text(text: &str) -> Result<IntMatrix> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("bad header {header:?}: {e}"))))
            .collect::<Result<_>>()?;
        if dims.len() != 2 {
            return Err(Error::Parse(format!("header must be 'rows cols', got {header:?}")));
        }
        let (r, c) = (dims[0], dims[1]);
        let mut data = Vec::with_capacity(r * c);
        for _ in 0..r {
            let line = lines.next().ok_or_else(|| Error::Parse("too few rows".into()))?;
            let row: Vec<i128> = line
                .split_whitespace()
                .map(|t| t.parse::<i128>().map_err(|e| Error::Parse(format!("bad entry {t:?}: {e}"))))
                .collect::<Result<_>>()?;
            if row.len() != c {
                return Err(Error::Parse(format!("expected {c} entries, found {}", row.len())));
            }
            data.extend(row);
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing rows after matrix".into()));
        }
        IntMatrix::new(r, c, data)
    }

    /// Text format with right-aligned columns.
    pub fn to_text(&self) -> String {
        let w = self.data.iter().map(|v| v.to_string().len()).max().unwrap_or(1);
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v:>w$}")).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for IntMatrix {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

fn require_square(m: &IntMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        })
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_exact(m: &IntMatrix) -> Result<BigInt> {
    require_square(m)?;
    match bareiss_i128(m) {
        Some(d) => Ok(BigInt::from(d)),
        None => Ok(bareiss_big(m)),
    }
}

fn bareiss_i128(m: &IntMatrix) -> Option<i128> {
    let n = m.rows;
    if n == 0 {
        return Some(1);
    }
    let mut a = m.data.clone();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let p = (k + 1..n).find(|&i| a[i * n + k] != 0)?;
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            sign = -sign;
        }
        let piv = a[k * n + k];
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i * n + j]
                    .checked_mul(piv)?
                    .checked_sub(a[i * n + k].checked_mul(a[k * n + j])?)?;
                a[i * n + j] = v / prev;
            }
            a[i * n + k] = 0;
        }
        prev = piv;
    }
    a[n * n - 1].checked_mul(sign)
}

// A zero column makes `bareiss_i128` bail out through `find`; that case is
// handled here as well, so the big-integer path is total.
fn bareiss_big(m: &IntMatrix) -> BigInt {
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<BigInt> = m.data.iter().map(|&v| BigInt::from(v)).collect();
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                Some(p) => {
                    for j in 0..n {
                        a.swap(k * n + j, p * n + j);
                    }
                    sign = !sign;
                }
                None => return BigInt::zero(),
            }
        }
        let piv = a[k * n + k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &piv - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
            a[i * n + k] = BigInt::zero();
        }
        prev = piv;
    }
    let d = a[n * n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Leading principal minors `det M_1, ..., det M_n`, exact.
pub fn leading_minors(m: &IntMatrix) -> Result<Vec<BigInt>> {
    require_square(m)?;
    (1..=m.rows).map(|k| det_exact(&m.leading(k))).collect()
}

/// True when a symmetric matrix is positive definite (Sylvester's criterion).
pub fn is_positive_definite(m: &IntMatrix) -> Result<bool> {
    require_square(m)?;
    if !m.is_symmetric() {
        return Ok(false);
    }
    for k in 1..=m.rows {
        if det_exact(&m.leading(k))?.sign() != num_bigint::Sign::Plus {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Characteristic polynomial `det(λI − M)`, monic, coefficients stored from
/// the constant term upwards. Consequently `eval(0) = (−1)ⁿ det M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharPoly {
    coeffs: Vec<BigInt>,
}

impl CharPoly {
    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Decimal strings, constant term first.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn from_strings(s: &[String]) -> Result<Self> {
        let coeffs = s
            .iter()
            .map(|t| t.parse::<BigInt>().map_err(|e| Error::Parse(format!("bad coefficient {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.last().map_or(true, |c| !c.is_one()) {
            return Err(Error::Parse("characteristic polynomial must be monic".into()));
        }
        Ok(CharPoly { coeffs })
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{mag}x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{mag}x^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Characteristic polynomial by the Faddeev–LeVerrier recursion. Every
/// division is checked to be exact.
pub fn char_poly(m: &IntMatrix) -> Result<CharPoly> {
    require_square(m)?;
    let n = m.rows;
    let a: Vec<BigInt> = m.data.iter().map(|&v| BigInt::from(v)).collect();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    // mk holds M_k; starts at M_1 = I.
    let mut mk: Vec<BigInt> = (0..n * n)
        .map(|t| if t / n == t % n { BigInt::one() } else { BigInt::zero() })
        .collect();
    for k in 1..=n {
        // am = A * M_k
        let mut am = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for l in 0..n {
                let x = &a[i * n + l];
                if x.is_zero() {
                    continue;
                }
                for j in 0..n {
                    am[i * n + j] += x * &mk[l * n + j];
                }
            }
        }
        let tr: BigInt = (0..n).map(|i| am[i * n + i].clone()).sum();
        let kk = BigInt::from(k);
        if !(&tr % &kk).is_zero() {
            return Err(Error::InvalidEntry("inexact division in trace recursion".into()));
        }
        let c = -(tr / kk);
        if k < n {
            for i in 0..n {
                am[i * n + i] += &c;
            }
            mk = am;
        }
        coeffs[n - k] = c;
    }
    Ok(CharPoly { coeffs })
}

/// Matrix of ±1 entries.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignMatrix {
    n: usize,
    data: Vec<i8>,
}

impl SignMatrix {
    pub fn new(n: usize, data: Vec<i8>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(format!("{} entries for order {n}", data.len())));
        }
        if let Some(v) = data.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidEntry(format!("sign matrix entry {v}")));
        }
        Ok(SignMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: rows.first().map_or(0, |r| r.len()),
            });
        }
        Self::new(n, rows.concat())
    }

    /// Rows given as bit masks, most significant of the `n` bits is column 0;
    /// a set bit is +1.
    pub fn from_masks(n: usize, masks: &[u64]) -> Result<Self> {
        if masks.len() != n {
            return Err(Error::DimensionMismatch("mask count".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for &m in masks {
            for j in 0..n {
                data.push(if m >> (n - 1 - j) & 1 == 1 { 1 } else { -1 });
            }
        }
        Self::new(n, data)
    }

    pub fn from_int_matrix(m: &IntMatrix) -> Result<Self> {
        require_square(m)?;
        let data = m
            .entries()
            .iter()
            .map(|&v| match v {
                1 => Ok(1i8),
                -1 => Ok(-1i8),
                _ => Err(Error::InvalidEntry(format!("sign matrix entry {v}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SignMatrix { n: m.rows, data })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i8) {
        assert!(v == 1 || v == -1);
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as i128)
    }

    pub fn transpose(&self) -> SignMatrix {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.get(j, i));
            }
        }
        SignMatrix { n, data }
    }

    pub fn negate_row(&mut self, i: usize) {
        for v in &mut self.data[i * self.n..(i + 1) * self.n] {
            *v = -*v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.n {
            self.data[i * self.n + j] = -self.data[i * self.n + j];
        }
    }

    /// Rows as bit masks (column 0 in the most significant position).
    pub fn row_masks(&self) -> Vec<u64> {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .fold(0u64, |acc, &v| (acc << 1) | u64::from(v == 1))
            })
            .collect()
    }

    pub fn det(&self) -> BigInt {
        det_exact(&self.to_int_matrix()).expect("square by construction")
    }
}

impl fmt::Debug for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SignMatrix {} [", self.n)?;
        for i in 0..self.n {
            let s: String = self.row(i).iter().map(|&v| if v > 0 { '+' } else { '-' }).collect();
            writeln!(f, "  {s}")?;
        }
        write!(f, "]")
    }
}

fn gram(r: &SignMatrix, rows: bool) -> IntMatrix {
    let n = r.n;
    let mut g = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let s: i128 = (0..n)
                .map(|k| {
                    let (a, b) = if rows {
                        (r.get(i, k), r.get(j, k))
                    } else {
                        (r.get(k, i), r.get(k, j))
                    };
                    (a * b) as i128
                })
                .sum();
            g.set(i, j, s);
            g.set(j, i, s);
        }
    }
    g
}

/// `R Rᵀ`.
pub fn gram_rows(r: &SignMatrix) -> IntMatrix {
    gram(r, true)
}

/// `Rᵀ R`.
pub fn gram_cols(r: &SignMatrix) -> IntMatrix {
    gram(r, false)
}

/// Returns the integer square root of `v` when `v` is a perfect square.
pub fn is_perfect_square(v: &BigInt) -> Result<Option<BigInt>> {
    if v.is_negative() {
        return Err(Error::NegativeInput(format!("perfect-square test of {v}")));
    }
    if let Some(small) = v.to_u128() {
        let r = small.sqrt();
        return Ok((r * r == small).then(|| BigInt::from(r)));
    }
    let r = v.sqrt();
    Ok((&r * &r == *v).then_some(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cofactor_det(m: &[Vec<i128>]) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        let mut total = BigInt::zero();
        for j in 0..n {
            let minor: Vec<Vec<i128>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
                .collect();
            let term = BigInt::from(m[0][j]) * cofactor_det(&minor);
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    #[test]
    fn identity_det_is_one() {
        assert_eq!(det_exact(&IntMatrix::identity(5)).unwrap(), BigInt::one());
    }

    #[test]
    fn non_square_is_rejected() {
        let m = IntMatrix::zeros(2, 3);
        assert!(matches!(det_exact(&m), Err(Error::NotSquare { .. })));
        assert!(char_poly(&m).is_err());
    }

    #[test]
    fn zero_column_and_pivoting() {
        let m = IntMatrix::from_rows(&[vec![0i64, 1], vec![1, 0]]).unwrap();
        assert_eq!(det_exact(&m).unwrap(), BigInt::from(-1));
        let z = IntMatrix::from_rows(&[vec![0i64, 1], vec![0, 5]]).unwrap();
        assert_eq!(det_exact(&z).unwrap(), BigInt::zero());
    }

    #[test]
    fn big_fallback_matches() {
        // Diagonal near 1e18 overflows the i128 intermediates.
        let m = IntMatrix::from_fn(6, 6, |i, j| {
            let base = 1_000_000_000_000_000_000i128;
            if i == j { base + i as i128 } else { (i * 7 + j * 3) as i128 % 11 - 5 }
        });
        let rows = m.to_rows();
        assert_eq!(det_exact(&m).unwrap(), cofactor_det(&rows));
    }

    #[test]
    fn two_by_two_charpoly() {
        for (n, a) in [(7i128, -1i128), (9, 5), (11, 3)] {
            let m = IntMatrix::from_rows(&[vec![n, a], vec![a, n]]).unwrap();
            let p = char_poly(&m).unwrap();
            let expect = [n * n - a * a, -2 * n, 1];
            assert_eq!(p.coefficients(), &expect.map(BigInt::from)[..]);
        }
    }

    #[test]
    fn gram_of_all_ones() {
        let r = SignMatrix::new(3, vec![1; 9]).unwrap();
        assert_eq!(gram_rows(&r), IntMatrix::from_fn(3, 3, |_, _| 3));
        assert_eq!(gram_cols(&r), IntMatrix::from_fn(3, 3, |_, _| 3));
    }

    #[test]
    fn perfect_squares() {
        assert_eq!(is_perfect_square(&BigInt::zero()).unwrap(), Some(BigInt::zero()));
        assert_eq!(is_perfect_square(&BigInt::from(2)).unwrap(), None);
        let k = BigInt::from(108u64 * 243 * 16384);
        assert_eq!(is_perfect_square(&(&k * &k)).unwrap(), Some(k));
        assert!(is_perfect_square(&BigInt::from(-4)).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let m = IntMatrix::from_rows(&[vec![1i64, -2, 3], vec![4, 5, -6]]).unwrap();
        let t = m.to_text();
        assert_eq!(t, "2 3\n 1 -2  3\n 4  5 -6\n");
        assert_eq!(IntMatrix::parse_text(&t).unwrap(), m);
        assert!(IntMatrix::parse_text("2 2\n1 2\n3\n").is_err());
        assert!(IntMatrix::parse_text("2 2\n1 2\n3 x\n").is_err());
    }

    #[test]
    fn charpoly_display() {
        let m = IntMatrix::from_rows(&[vec![3i64, -1], vec![-1, 3]]).unwrap();
        assert_eq!(char_poly(&m).unwrap().to_string(), "x^2 - 6x + 8");
    }

    fn small_matrix(max_n: usize, lim: i64) -> impl Strategy<Value = IntMatrix> {
        (1..=max_n).prop_flat_map(move |n| {
            proptest::collection::vec(-lim..=lim, n * n)
                .prop_map(move |v| IntMatrix::from_rows(&v.chunks(n).map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap())
        })
    }

    fn sign_matrix(lo: usize, hi: usize) -> impl Strategy<Value = SignMatrix> {
        (lo..=hi).prop_flat_map(|n| {
            proptest::collection::vec(prop::bool::ANY, n * n)
                .prop_map(move |b| SignMatrix::new(n, b.into_iter().map(|x| if x { 1 } else { -1 }).collect()).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn det_matches_cofactor(m in small_matrix(5, 9)) {
            prop_assert_eq!(det_exact(&m).unwrap(), cofactor_det(&m.to_rows()));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn det_of_gram_is_square_of_det(r in sign_matrix(3, 11)) {
            let d = r.det();
            prop_assert_eq!(det_exact(&gram_rows(&r)).unwrap(), &d * &d);
            prop_assert_eq!(det_exact(&gram_cols(&r)).unwrap(), &d * &d);
        }

        #[test]
        fn charpoly_ab_equals_ba(
            (a, b) in (1usize..=6).prop_flat_map(|n| (
                proptest::collection::vec(-9i64..=9, n * n),
                proptest::collection::vec(-9i64..=9, n * n),
            ).prop_map(move |(x, y)| {
                let mk = |v: Vec<i64>| IntMatrix::from_rows(&v.chunks(n).map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap();
                (mk(x), mk(y))
            }))
        ) {
            let ab = a.mul(&b).unwrap();
            let ba = b.mul(&a).unwrap();
            prop_assert_eq!(char_poly(&ab).unwrap(), char_poly(&ba).unwrap());
        }

        #[test]
        fn charpoly_at_zero_is_signed_det(m in small_matrix(6, 9)) {
            let p = char_poly(&m).unwrap();
            let d = det_exact(&m).unwrap();
            let expect = if m.order() % 2 == 0 { d } else { -d };
            prop_assert_eq!(p.eval(&BigInt::zero()), expect);
            prop_assert_eq!(p.degree(), m.order());
        }

        #[test]
        fn gram_rows_cols_same_charpoly(r in sign_matrix(7, 7)) {
            prop_assert_eq!(char_poly(&gram_rows(&r)).unwrap(), char_poly(&gram_cols(&r)).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn perfect_square_detection(bytes in proptest::collection::vec(any::<u8>(), 1..=25)) {
            let k = BigInt::from_bytes_be(num_bigint::Sign::Plus, &bytes);
            let sq = &k * &k;
            prop_assert_eq!(is_perfect_square(&sq).unwrap(), Some(k.clone()));
            if !k.is_zero() {
                prop_assert_eq!(is_perfect_square(&(sq + 1u32)).unwrap(), None);
            }
        }
    }
}
