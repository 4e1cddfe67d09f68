//! Exhaustive enumeration of candidate Gram matrices above a determinant
//! threshold.

pub mod bound;
mod engine;
pub mod num;
pub mod oracle;
mod scan;

use std::cmp::Ordering;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{matrix_compare, CandidateGram};
use crate::linalg::IntMatrix;

pub use engine::{PrefixList, Snapshot};
pub use scan::{charpoly_classes, ehlich_block_scan, multiplicity_report, CharPolyClass, EhlichHit, MultiplicityRow};

use engine::{Engine, Found, Shared};

/// Which determinant bound prunes interior nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    /// The bordered-determinant bound (sharpened for `n ≡ 3 mod 4`).
    Theorem,
    /// Only `det M ≤ det M_r · n^{n−r}`.
    Fischer,
    /// No determinant pruning at interior nodes.
    Off,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub d_min: BigInt,
    /// Emit every perfect-square determinant at or above the threshold;
    /// when false only the largest determinant found is kept.
    pub emit_all_square: bool,
    /// Order of the subtree roots handed to workers; 0 runs sequentially.
    pub parallel_depth: usize,
    /// Worker threads; 0 uses the available parallelism.
    pub jobs: usize,
    pub checkpoint_path: Option<PathBuf>,
    pub bound_mode: BoundMode,
    /// Abort after roughly this many nodes.
    pub node_budget: Option<u64>,
    /// Minimum seconds between checkpoint writes.
    pub checkpoint_interval_secs: u64,
}

impl SearchConfig {
    pub fn new(n: usize, d_min: BigInt) -> Self {
        SearchConfig {
            n,
            d_min,
            emit_all_square: true,
            parallel_depth: 0,
            jobs: 0,
            checkpoint_path: None,
            bound_mode: BoundMode::Theorem,
            node_budget: None,
            checkpoint_interval_secs: 60,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n % 2 == 0 {
            return Err(Error::EvenOrder(self.n));
        }
        if self.n > 101 {
            return Err(Error::UnsupportedOrder {
                n: self.n,
                reason: "orders above 101 are not supported".into(),
            });
        }
        if self.d_min < BigInt::from(1) {
            return Err(Error::InvalidArgument("d_min must be at least 1".into()));
        }
        Ok(())
    }

    pub fn threshold(&self) -> BigInt {
        &self.d_min * &self.d_min
    }
}

/// Node counters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Positive definite extensions examined, indexed by order.
    pub nodes: Vec<u64>,
    pub bound_tests: u64,
    pub pruned_bound: u64,
    pub rejected_block_order: u64,
    pub rejected_lex_max: u64,
    pub fast_paths: u64,
    pub leaves: u64,
    pub subtrees: u64,
}

impl SearchStats {
    pub fn new(n: usize) -> Self {
        SearchStats {
            nodes: vec![0; n + 1],
            ..Default::default()
        }
    }

    pub fn total_nodes(&self) -> u64 {
        self.nodes.iter().sum()
    }

    pub fn merge(&mut self, o: &SearchStats) {
        if self.nodes.len() < o.nodes.len() {
            self.nodes.resize(o.nodes.len(), 0);
        }
        for (a, b) in self.nodes.iter_mut().zip(&o.nodes) {
            *a += b;
        }
        self.bound_tests += o.bound_tests;
        self.pruned_bound += o.pruned_bound;
        self.rejected_block_order += o.rejected_block_order;
        self.rejected_lex_max += o.rejected_lex_max;
        self.fast_paths += o.fast_paths;
        self.leaves += o.leaves;
        self.subtrees += o.subtrees;
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Canonically ordered: descending determinant, then descending abs-lex.
    pub candidates: Vec<CandidateGram>,
    pub stats: SearchStats,
    pub wall_secs: f64,
}

/// Canonical output order.
pub fn candidate_order(a: &CandidateGram, b: &CandidateGram) -> Ordering {
    b.det().cmp(a.det()).then_with(|| matrix_compare(b.matrix(), a.matrix()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct StoredFound {
    rows: Vec<Vec<i8>>,
    det: String,
}

impl StoredFound {
    fn from_found(f: &Found) -> Self {
        StoredFound {
            rows: f.matrix.to_rows().into_iter().map(|r| r.into_iter().map(|v| v as i8).collect()).collect(),
            det: f.det.to_string(),
        }
    }

    fn to_found(&self) -> Result<Found> {
        Ok(Found {
            matrix: IntMatrix::from_rows(&self.rows)?,
            det: self
                .det
                .parse()
                .map_err(|e| Error::Parse(format!("checkpoint determinant: {e}")))?,
        })
    }
}

/// Serialized progress of a parallel search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    version: u32,
    n: usize,
    d_min: String,
    bound_mode: BoundMode,
    parallel_depth: usize,
    frontier: Vec<Snapshot>,
    done: Vec<bool>,
    results: Vec<StoredFound>,
    stats: SearchStats,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string(self)?;
        std::fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    pub fn pending(&self) -> usize {
        self.done.iter().filter(|d| !**d).count()
    }

    pub fn frontier_len(&self) -> usize {
        self.frontier.len()
    }

    fn check_matches(&self, cfg: &SearchConfig) -> Result<()> {
        if self.n != cfg.n || self.d_min != cfg.d_min.to_string() || self.bound_mode != cfg.bound_mode {
            return Err(Error::CheckpointMismatch(format!(
                "checkpoint is for n={} d_min={} {:?}",
                self.n, self.d_min, self.bound_mode
            )));
        }
        Ok(())
    }
}

/// Runs the search from scratch.
pub fn search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    run(cfg, None)
}

/// Continues a search from a checkpoint written by an earlier run.
pub fn resume(cfg: &SearchConfig, checkpoint: &Path) -> Result<SearchOutcome> {
    let cp = Checkpoint::load(checkpoint)?;
    cp.check_matches(cfg)?;
    run(cfg, Some(cp))
}

fn run(cfg: &SearchConfig, resume_from: Option<Checkpoint>) -> Result<SearchOutcome> {
    cfg.validate()?;
    let thr = cfg.threshold();
    if num::fits_i128(cfg.n, &thr) {
        run_typed::<i128>(cfg, &thr, resume_from)
    } else {
        run_typed::<BigInt>(cfg, &thr, resume_from)
    }
}

fn run_typed<T: num::SearchInt>(cfg: &SearchConfig, thr: &BigInt, resume_from: Option<Checkpoint>) -> Result<SearchOutcome> {
    let start = Instant::now();
    let nodes = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let shared = || Shared {
        budget: cfg.node_budget,
        nodes: &nodes,
        abort: &abort,
    };
    let n = cfg.n;
    let depth = cfg.parallel_depth;
    let parallel = depth >= 2 && depth < n;

    let mut stats = SearchStats::new(n);
    let found: Vec<Found>;

    if !parallel && resume_from.is_none() {
        let mut eng = Engine::<T>::new(n, thr, cfg.bound_mode, None, shared());
        eng.run_root();
        eng.flush_nodes();
        if abort.load(AtomicOrdering::Relaxed) {
            return Err(Error::BudgetExhausted {
                budget: cfg.node_budget.unwrap_or(0),
                checkpoint: None,
            });
        }
        stats.merge(&eng.stats);
        found = eng.found;
    } else {
        let cp = match resume_from {
            Some(cp) => cp,
            None => {
                let mut eng = Engine::<T>::new(n, thr, cfg.bound_mode, Some(depth), shared());
                eng.run_root();
                eng.flush_nodes();
                if abort.load(AtomicOrdering::Relaxed) {
                    return Err(Error::BudgetExhausted {
                        budget: cfg.node_budget.unwrap_or(0),
                        checkpoint: None,
                    });
                }
                let frontier = std::mem::take(&mut eng.frontier);
                Checkpoint {
                    version: 1,
                    n,
                    d_min: cfg.d_min.to_string(),
                    bound_mode: cfg.bound_mode,
                    parallel_depth: depth,
                    done: vec![false; frontier.len()],
                    frontier,
                    results: eng.found.iter().map(StoredFound::from_found).collect(),
                    stats: eng.stats.clone(),
                }
            }
        };
        let cp = process_frontier::<T>(cfg, thr, cp, &nodes, &abort)?;
        stats = cp.stats.clone();
        found = cp.results.iter().map(StoredFound::to_found).collect::<Result<_>>()?;
    }

    let mut candidates: Vec<CandidateGram> = found
        .into_par_iter()
        .map(|f| CandidateGram::new(n, f.matrix))
        .collect::<Result<_>>()?;
    candidates.sort_by(candidate_order);
    if !cfg.emit_all_square {
        if let Some(top) = candidates.first().map(|c| c.det().clone()) {
            candidates.retain(|c| *c.det() == top);
        }
    }
    Ok(SearchOutcome {
        candidates,
        stats,
        wall_secs: start.elapsed().as_secs_f64(),
    })
}

struct Progress {
    cp: Checkpoint,
    last_write: Instant,
}

fn process_frontier<T: num::SearchInt>(
    cfg: &SearchConfig,
    thr: &BigInt,
    cp: Checkpoint,
    nodes: &AtomicU64,
    abort: &AtomicBool,
) -> Result<Checkpoint> {
    let pending: Vec<usize> = (0..cp.frontier.len()).filter(|&i| !cp.done[i]).collect();
    let frontier = cp.frontier.clone();
    let progress = Mutex::new(Progress {
        cp,
        last_write: Instant::now(),
    });
    let write_err: Mutex<Option<Error>> = Mutex::new(None);

    let work = || {
        pending.par_iter().for_each(|&i| {
            if abort.load(AtomicOrdering::Relaxed) {
                return;
            }
            let mut eng = Engine::<T>::new(
                cfg.n,
                thr,
                cfg.bound_mode,
                None,
                Shared {
                    budget: cfg.node_budget,
                    nodes,
                    abort,
                },
            );
            eng.run_snapshot(&frontier[i]);
            eng.flush_nodes();
            if abort.load(AtomicOrdering::Relaxed) {
                return;
            }
            let mut p = progress.lock().expect("progress lock");
            p.cp.done[i] = true;
            p.cp.results.extend(eng.found.iter().map(StoredFound::from_found));
            eng.stats.subtrees = 1;
            p.cp.stats.merge(&eng.stats);
            if let Some(path) = &cfg.checkpoint_path {
                if p.last_write.elapsed().as_secs() >= cfg.checkpoint_interval_secs {
                    if let Err(e) = p.cp.save(path) {
                        *write_err.lock().expect("error lock") = Some(e);
                    }
                    p.last_write = Instant::now();
                }
            }
        })
    };
    if cfg.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(work);
    } else {
        work();
    }

    if let Some(e) = write_err.into_inner().expect("error lock") {
        return Err(e);
    }
    let p = progress.into_inner().expect("progress lock");
    if let Some(path) = &cfg.checkpoint_path {
        p.cp.save(path)?;
    }
    if abort.load(AtomicOrdering::Relaxed) {
        return Err(Error::BudgetExhausted {
            budget: cfg.node_budget.unwrap_or(0),
            checkpoint: cfg.checkpoint_path.clone(),
        });
    }
    Ok(p.cp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::construct_ehlich_block;
    use crate::linalg::is_perfect_square;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn run(n: usize, d_min: BigInt, mode: BoundMode) -> Vec<(IntMatrix, BigInt)> {
        let mut cfg = SearchConfig::new(n, d_min);
        cfg.bound_mode = mode;
        search(&cfg)
            .unwrap()
            .candidates
            .into_iter()
            .map(|c| (c.matrix().clone(), c.det().clone()))
            .collect()
    }

    #[test]
    fn order_three() {
        let got = run(3, b(4), BoundMode::Theorem);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].0, construct_ehlich_block(3, &[1, 1, 1]).unwrap().into_matrix());
        assert_eq!(got[0].1, b(16));
        assert!(run(3, b(5), BoundMode::Theorem).is_empty());
    }

    #[test]
    fn matches_brute_force_small_orders() {
        for (n, dmins) in [(3usize, vec![1i64, 4]), (5, vec![1, 2, 3 * 16]), (7, vec![1, 200, 400, 9 * 64])] {
            for d in dmins {
                let want = oracle::reference_search(n, &b(d));
                for mode in [BoundMode::Theorem, BoundMode::Fischer, BoundMode::Off] {
                    assert_eq!(run(n, b(d), mode), want, "n={n} d_min={d} {mode:?}");
                }
            }
        }
    }

    #[test]
    fn order_seven_and_nine_maxima() {
        let seven = run(7, b(9 * 64), BoundMode::Theorem);
        assert_eq!(seven.len(), 1);
        assert_eq!(seven[0].0, construct_ehlich_block(7, &[2, 2, 2, 1]).unwrap().into_matrix());
        let nine = run(9, b(56 * 256), BoundMode::Theorem);
        assert_eq!(nine.len(), 1);
        assert_eq!(nine[0].1, b(56 * 256) * b(56 * 256));
    }

    #[test]
    fn pruning_does_not_change_order_nine() {
        let d = b(41 * 256);
        let a = run(9, d.clone(), BoundMode::Theorem);
        let f = run(9, d, BoundMode::Fischer);
        assert_eq!(a, f);
        let counts: Vec<i64> = a.iter().map(|(_, det)| {
            let s = is_perfect_square(det).unwrap().unwrap() / b(256);
            i64::try_from(s).unwrap()
        }).collect();
        let mut hist = std::collections::BTreeMap::new();
        for c in counts {
            *hist.entry(c).or_insert(0) += 1;
        }
        assert_eq!(hist.into_iter().collect::<Vec<_>>(), vec![(42, 1), (44, 2), (45, 1), (48, 4), (56, 1)]);
    }
}
