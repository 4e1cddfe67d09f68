//! One function per subcommand. Outputs are JSON-lines files whose first
//! line is the run manifest; without `--out` the lines go to stdout.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use maxdet::bounds::applicable_bounds;
use maxdet::decompose::{full_decompose, pair_by_charpoly, Certificate, DecomposeConfig, DecompositionProblem, Verdict};
use maxdet::detrange::range_certify;
use maxdet::io::{read_candidates, sign_rows, write_jsonl, CandidateRecord};
use maxdet::search::{ehlich_block_scan, resume, search, BoundMode, SearchConfig};

use crate::manifest::RunManifest;
use crate::verify::{self, VerifyOptions};

/// Writes the manifest and records to `out`, or to stdout.
pub fn emit<T: Serialize>(out: Option<&Path>, mut manifest: RunManifest, records: &[T]) -> Result<()> {
    manifest.digest_body(records)?;
    let header = manifest.to_value();
    match out {
        Some(p) => write_jsonl(p, Some(&header), records).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            writeln!(w, "{}", json!({ maxdet::io::HEADER_KEY: header }))?;
            for r in records {
                writeln!(w, "{}", serde_json::to_string(r)?)?;
            }
        }
    }
    Ok(())
}

pub fn bounds(n: usize, as_json: bool) -> Result<()> {
    let reports = applicable_bounds(n)?;
    if as_json {
        for r in &reports {
            println!("{}", serde_json::to_string(r)?);
        }
    } else {
        for r in &reports {
            println!(
                "{:<18} floor {}  integral {}",
                r.name, r.floor_value, r.is_integral
            );
        }
    }
    Ok(())
}

pub struct SearchArgs {
    pub n: usize,
    pub d_min: BigInt,
    pub jobs: usize,
    pub parallel_depth: usize,
    pub checkpoint: Option<PathBuf>,
    pub resume: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub bound_mode: BoundMode,
    pub node_budget: Option<u64>,
    pub top_only: bool,
}

pub fn search_cmd(a: SearchArgs) -> Result<()> {
    let mut cfg = SearchConfig::new(a.n, a.d_min);
    cfg.jobs = a.jobs;
    cfg.parallel_depth = a.parallel_depth;
    cfg.checkpoint_path = a.checkpoint.clone().or_else(|| a.resume.clone());
    cfg.bound_mode = a.bound_mode;
    cfg.node_budget = a.node_budget;
    cfg.emit_all_square = !a.top_only;
    let out = match &a.resume {
        Some(p) => resume(&cfg, p)?,
        None => search(&cfg)?,
    };
    let mut m = RunManifest::new("search", serde_json::to_value(&cfg)?);
    if let Some(p) = &a.resume {
        m.add_input(p)?;
    }
    m.nodes = Some(out.stats.total_nodes());
    m.wall_secs = out.wall_secs;
    m.config["stats"] = serde_json::to_value(&out.stats)?;
    let recs: Vec<CandidateRecord> = out.candidates.iter().map(CandidateRecord::from).collect();
    eprintln!(
        "{} candidates, {} nodes, {:.2}s",
        recs.len(),
        out.stats.total_nodes(),
        out.wall_secs
    );
    emit(a.out.as_deref(), m, &recs)
}

#[derive(Serialize)]
pub struct DecomposeRecord {
    pub problem: [usize; 2],
    pub verdict: Verdict,
    pub class_count: usize,
    pub complete: bool,
    pub raw_witnesses: usize,
    pub witnesses: Vec<Vec<Vec<i8>>>,
    pub certificate: Certificate,
}

pub struct DecomposeArgs {
    pub input: PathBuf,
    pub pair: Option<(usize, usize)>,
    pub budget: u64,
    pub max_witnesses: usize,
    pub out: Option<PathBuf>,
}

pub fn decompose_cmd(a: DecomposeArgs) -> Result<bool> {
    let t = Instant::now();
    let (_, cands) = read_candidates(&a.input)?;
    let pairs = match a.pair {
        Some((i, j)) => {
            if i >= cands.len() || j >= cands.len() {
                bail!("pair ({i}, {j}) out of range for {} candidates", cands.len());
            }
            vec![(i, j)]
        }
        None => pair_by_charpoly(&cands),
    };
    let cfg = DecomposeConfig {
        node_budget: a.budget,
        max_witnesses: a.max_witnesses,
    };
    use rayon::prelude::*;
    let recs = pairs
        .par_iter()
        .map(|&(i, j)| {
            let p = DecompositionProblem::new(cands[i].clone(), cands[j].clone())?;
            let r = full_decompose(&p, &cfg)?;
            Ok(DecomposeRecord {
                problem: [i, j],
                verdict: r.verdict,
                class_count: r.class_count,
                complete: r.complete,
                raw_witnesses: r.raw_witnesses,
                witnesses: r.witnesses.iter().map(sign_rows).collect(),
                certificate: r.certificate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for r in &recs {
        eprintln!(
            "({}, {}) {} classes={}{}",
            r.problem[0],
            r.problem[1],
            r.verdict,
            r.class_count,
            if r.complete { "" } else { " (lower bound)" }
        );
    }
    let mut m = RunManifest::new(
        "decompose",
        json!({"input": a.input, "pair": a.pair, "budget": a.budget, "max_witnesses": a.max_witnesses}),
    );
    m.add_input(&a.input)?;
    m.nodes = Some(recs.iter().map(|r| r.certificate.nodes).sum());
    m.wall_secs = t.elapsed().as_secs_f64();
    emit(a.out.as_deref(), m, &recs)?;
    Ok(recs.iter().all(|r| r.verdict != Verdict::Inconclusive))
}

pub fn verify_cmd(target: &str, extended: bool, out: Option<&Path>) -> Result<bool> {
    let t = Instant::now();
    let opts = VerifyOptions {
        extended,
        compare_parallel: true,
    };
    let reports = verify::run(target, &opts)?;
    for r in &reports {
        for l in r.lines() {
            println!("{l}");
        }
    }
    let pass = reports.iter().all(|r| r.pass);
    println!("{}", if pass { "verify: all checks passed" } else { "verify: FAILED" });
    if let Some(p) = out {
        let mut m = RunManifest::new("verify", json!({"target": target, "extended": extended}));
        m.wall_secs = t.elapsed().as_secs_f64();
        emit(Some(p), m, &reports)?;
    }
    Ok(pass)
}

pub fn range_cmd(n: usize, gap_floor: u64, out: Option<&Path>) -> Result<bool> {
    let t = Instant::now();
    let s = range_certify(n, gap_floor)?;
    for v in &s.found {
        eprintln!("{:>8} {:>4}  [{}]", v.value, v.candidates, v.classes);
    }
    eprintln!(
        "{} candidates; range {}",
        s.total_candidates,
        if s.complete { "certified complete" } else { "NOT certified" }
    );
    let mut m = RunManifest::new("range", json!({"n": n, "gap_floor": gap_floor}));
    m.wall_secs = t.elapsed().as_secs_f64();
    emit(out, m, std::slice::from_ref(&s))?;
    Ok(s.complete)
}

pub fn ehlich_scan_cmd(n: usize, d_min: BigInt, out: Option<&Path>) -> Result<()> {
    let t = Instant::now();
    let hits = ehlich_block_scan(n, &d_min)?;
    let mut m = RunManifest::new("ehlich-scan", json!({"n": n, "d_min": d_min.to_string()}));
    m.wall_secs = t.elapsed().as_secs_f64();
    let recs: Vec<Value> = hits
        .iter()
        .map(|h| json!({"sizes": h.sizes, "det": h.det.to_string(), "sqrt_det": h.sqrt_det.to_string()}))
        .collect();
    eprintln!("{} Ehlich block matrices at or above the threshold", recs.len());
    emit(out, m, &recs)
}

/// Prints every candidate of a file as an aligned integer matrix.
pub fn show_cmd(input: &Path) -> Result<()> {
    let (_, cands) = read_candidates(input)?;
    for (i, c) in cands.iter().enumerate() {
        println!(
            "# {i}: n={} det={} sqrt={}",
            c.n(),
            c.det(),
            c.sqrt_det().map_or("-".into(), |s| s.to_string())
        );
        print!("{}", c.matrix().to_text());
    }
    Ok(())
}
