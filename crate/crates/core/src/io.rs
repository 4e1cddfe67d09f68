//! JSON-lines files: an optional header object followed by one record per
//! line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gram::CandidateGram;
use crate::linalg::{CharPoly, IntMatrix, SignMatrix};

/// Key marking the header line.
pub const HEADER_KEY: &str = "manifest";

/// One candidate per line. Big integers are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub n: usize,
    pub matrix: Vec<Vec<i64>>,
    pub det: String,
    pub sqrt_det: Option<String>,
    pub charpoly: Vec<String>,
    /// Block ranges `[start, end)`; absent when the matrix is not in block
    /// form.
    pub blocks: Option<Vec<[usize; 2]>>,
}

impl From<&CandidateGram> for CandidateRecord {
    fn from(c: &CandidateGram) -> Self {
        CandidateRecord {
            n: c.n(),
            matrix: matrix_rows(c.matrix()),
            det: c.det().to_string(),
            sqrt_det: c.sqrt_det().map(|s| s.to_string()),
            charpoly: c.charpoly().to_strings(),
            blocks: c.block_ranges().ok().map(|r| r.iter().map(|x| [x.start, x.end]).collect()),
        }
    }
}

impl CandidateRecord {
    /// Rebuilds the candidate and checks the stored invariants against it.
    pub fn to_candidate(&self) -> Result<CandidateGram> {
        let m = IntMatrix::from_rows(&self.matrix)?;
        let c = CandidateGram::new(self.n, m)?;
        let det: BigInt = self
            .det
            .parse()
            .map_err(|_| Error::Parse(format!("determinant {:?}", self.det)))?;
        if det != *c.det() {
            return Err(Error::Parse(format!("stored determinant {det} differs from {}", c.det())));
        }
        if CharPoly::from_strings(&self.charpoly)? != *c.charpoly() {
            return Err(Error::Parse("stored characteristic polynomial differs".into()));
        }
        Ok(c)
    }
}

pub fn matrix_rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&v| v as i64).collect()).collect()
}

pub fn sign_rows(r: &SignMatrix) -> Vec<Vec<i8>> {
    (0..r.order()).map(|i| r.row(i).to_vec()).collect()
}

/// Writes `{"manifest": header}` (when given) and then `records`.
pub fn write_jsonl<T: Serialize>(path: &Path, header: Option<&Value>, records: &[T]) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    let mut line = |v: String| writeln!(w, "{v}").map_err(|e| Error::io(path, e));
    if let Some(h) = header {
        line(serde_json::json!({ HEADER_KEY: h }).to_string())?;
    }
    for r in records {
        line(serde_json::to_string(r)?)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a JSON-lines file, returning the header (if any) and the records.
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<(Option<Value>, Vec<T>)> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut header = None;
    let mut out = Vec::new();
    for (k, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(&line)?;
        if k == 0 {
            if let Some(h) = v.get(HEADER_KEY) {
                header = Some(h.clone());
                continue;
            }
        }
        out.push(serde_json::from_value(v)?);
    }
    Ok((header, out))
}

pub fn read_candidates(path: &Path) -> Result<(Option<Value>, Vec<CandidateGram>)> {
    let (h, recs) = read_jsonl::<CandidateRecord>(path)?;
    let cands = recs.iter().map(|r| r.to_candidate()).collect::<Result<Vec<_>>>()?;
    Ok((h, cands))
}

pub fn write_candidates(path: &Path, header: Option<&Value>, cands: &[CandidateGram]) -> Result<()> {
    let recs: Vec<CandidateRecord> = cands.iter().map(CandidateRecord::from).collect();
    write_jsonl(path, header, &recs)
}
