use num_bigint::BigInt;
use tempfile::tempdir;

use maxdet::known::range_gap_floor;
use maxdet::search::{resume, search, Checkpoint, SearchConfig};
use maxdet::Error;

fn config(n: usize) -> SearchConfig {
    let floor = range_gap_floor(n).unwrap();
    let mut cfg = SearchConfig::new(n, BigInt::from(floor) << (n - 1));
    cfg.parallel_depth = 4;
    cfg.checkpoint_interval_secs = 0;
    cfg
}

#[test]
fn interrupted_search_resumes_to_the_same_result() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("n11.json");
    let full = search(&config(11)).unwrap();

    let mut cut = config(11);
    cut.checkpoint_path = Some(path.clone());
    cut.node_budget = Some(20_000);
    cut.jobs = 1;
    match search(&cut) {
        Err(Error::BudgetExhausted { checkpoint, .. }) => assert_eq!(checkpoint.as_deref(), Some(path.as_path())),
        other => panic!("expected an exhausted budget, got {:?}", other.map(|o| o.candidates.len())),
    }
    let cp = Checkpoint::load(&path).unwrap();
    assert!(cp.pending() > 0 && cp.pending() < cp.frontier_len());

    let mut rest = config(11);
    rest.checkpoint_path = Some(path.clone());
    let resumed = resume(&rest, &path).unwrap();
    assert_eq!(resumed.candidates, full.candidates);
    assert_eq!(resumed.stats.leaves, full.stats.leaves);
    assert_eq!(Checkpoint::load(&path).unwrap().pending(), 0);
}

#[test]
fn resume_rejects_a_different_problem() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("n9.json");
    let mut cfg = config(9);
    cfg.checkpoint_path = Some(path.clone());
    search(&cfg).unwrap();
    let other = SearchConfig::new(9, BigInt::from(1));
    assert!(matches!(resume(&other, &path), Err(Error::CheckpointMismatch(_))));
}
