//! Regression checks of search and decomposition against the published
//! candidate lists.

use std::time::Instant;

use anyhow::{bail, Result};
use num_bigint::BigInt;
use num_traits::pow;
use serde::Serialize;

use maxdet::bounds::known_max_det;
use maxdet::decompose::{
    find_isomorphism, full_decompose, pair_by_charpoly, verify_witness, DecomposeConfig, DecompositionProblem, Verdict,
};
use maxdet::detrange::{range_certify, Evidence};
use maxdet::gram::{check_class, CandidateGram};
use maxdet::io::CandidateRecord;
use maxdet::known::{
    decomposable_names, listed_candidates, listed_charpoly_twins, listed_d_min, order_11_gap_candidates,
    order_19_candidates, range_gap_floor, KnownCandidate, LISTED_ORDERS, ORDER_11_RANGE_COUNTS, ORDER_9_RANGE_COUNTS,
};
use maxdet::search::{ehlich_block_scan, search, SearchConfig};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub target: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub wall_secs: f64,
}

impl VerifyReport {
    fn new(target: String) -> Self {
        VerifyReport {
            target,
            pass: true,
            checks: Vec::new(),
            wall_secs: 0.0,
        }
    }

    fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.pass &= pass;
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| format!("[{}] {} {}: {}", if c.pass { "PASS" } else { "FAIL" }, self.target, c.name, c.detail))
            .collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub extended: bool,
    /// Also rerun the search in parallel and compare the serialized output.
    pub compare_parallel: bool,
}

/// Assigns each candidate a distinct isomorphic fixture.
fn match_fixtures(cands: &[CandidateGram], fixtures: &[KnownCandidate]) -> Vec<Option<usize>> {
    let mut used = vec![false; fixtures.len()];
    cands
        .iter()
        .map(|c| {
            let k = (0..fixtures.len()).find(|&k| {
                !used[k] && fixtures[k].gram.det() == c.det() && find_isomorphism(c.matrix(), fixtures[k].gram.matrix()).is_some()
            })?;
            used[k] = true;
            Some(k)
        })
        .collect()
}

fn serialized(cands: &[CandidateGram]) -> Vec<String> {
    cands
        .iter()
        .map(|c| serde_json::to_string(&CandidateRecord::from(c)).expect("serializes"))
        .collect()
}

/// Full regression for an order with a published list.
pub fn verify_listed(n: usize, opts: &VerifyOptions) -> Result<VerifyReport> {
    let (Some(d_min), Some(fixtures)) = (listed_d_min(n), listed_candidates(n)) else {
        bail!("order {n} has no published candidate list");
    };
    if n == 15 && !opts.extended {
        bail!("order 15 runs only with --extended");
    }
    let t = Instant::now();
    let mut rep = VerifyReport::new(format!("n={n}"));
    let out = search(&SearchConfig::new(n, d_min.clone()))?;
    let cands = &out.candidates;
    rep.check(
        "candidate count",
        cands.len() == fixtures.len(),
        format!("{} found, {} listed, {} nodes", cands.len(), fixtures.len(), out.stats.total_nodes()),
    );

    let m = match_fixtures(cands, &fixtures);
    let names: Vec<String> = m
        .iter()
        .map(|k| k.map_or("?".to_string(), |k| fixtures[k].name.clone()))
        .collect();
    rep.check(
        "candidates match listed matrices",
        m.iter().all(Option::is_some) && cands.len() == fixtures.len(),
        names.join(", "),
    );

    let scale = pow(BigInt::from(2), n - 1);
    let dets: Vec<String> = cands
        .iter()
        .map(|c| (c.sqrt_det().expect("square") / &scale).to_string())
        .collect();
    let dets_ok = fixtures.iter().all(|f| f.gram.sqrt_det() == Some(f.sqrt_det()))
        && m.iter().zip(cands).all(|(k, c)| k.map_or(false, |k| c.sqrt_det() == Some(fixtures[k].sqrt_det())));
    rep.check("determinants", dets_ok, format!("normalized sqrt(det): {}", dets.join(", ")));

    let mut twins: Vec<(usize, usize)> = Vec::new();
    let mut unmatched = false;
    for (a, b) in pair_by_charpoly(cands).into_iter().filter(|(a, b)| a != b) {
        match (m[a], m[b]) {
            (Some(x), Some(y)) => twins.push((x.min(y), x.max(y))),
            _ => unmatched = true,
        }
    }
    twins.sort_unstable();
    let expect = listed_charpoly_twins(n);
    let twin_names: Vec<String> = twins
        .iter()
        .map(|&(x, y)| format!("{}~{}", fixtures[x].name, fixtures[y].name))
        .collect();
    rep.check(
        "characteristic polynomial classes",
        !unmatched && twins == expect,
        if twin_names.is_empty() {
            "all distinct".to_string()
        } else {
            format!("shared: {}", twin_names.join(", "))
        },
    );

    let decomposable = decomposable_names(n);
    let dcfg = if n <= 15 {
        DecomposeConfig::default()
    } else {
        DecomposeConfig::existence()
    };
    let mut verdicts_ok = true;
    let mut witness_ok = true;
    let mut lines = Vec::new();
    let mut best: Option<BigInt> = None;
    let mut classes = Vec::new();
    for (i, j) in pair_by_charpoly(cands) {
        let p = DecompositionProblem::new(cands[i].clone(), cands[j].clone())?;
        let r = full_decompose(&p, &dcfg)?;
        let expect_witness = i == j && decomposable.contains(&names[i].as_str());
        let want = if expect_witness { Verdict::Witness } else { Verdict::None };
        verdicts_ok &= r.verdict == want && r.certificate.eliminations_confirmed;
        witness_ok &= r.witnesses.iter().all(|w| verify_witness(w, &p) && w.det().magnitude() == cands[i].sqrt_det().expect("square").magnitude());
        if r.verdict == Verdict::Witness {
            let s = cands[i].sqrt_det().expect("square");
            best = Some(best.map_or(s.clone(), |b: BigInt| b.max(s)));
            classes.push((names[i].clone(), r.class_count, r.complete));
        }
        lines.push(format!("({},{}) {}", names[i], names[j], r.verdict));
    }
    rep.check("decomposition verdicts", verdicts_ok, lines.join("; "));
    rep.check("witnesses verify", witness_ok, "RRᵀ, RᵀR and |det R| checked exactly");
    let md = known_max_det(n);
    rep.check(
        "maximal determinant",
        best.is_some() && best == md,
        format!("{} (from {})", best.map_or("none".into(), |b| b.to_string()), decomposable.join(", ")),
    );
    let class_detail: Vec<String> = classes
        .iter()
        .map(|(name, k, complete)| format!("{name}: {k}{}", if *complete { "" } else { "+" }))
        .collect();
    if n == 15 {
        rep.check(
            "equivalence classes",
            classes.len() == 1 && classes[0].1 == 1 && classes[0].2,
            class_detail.join(", "),
        );
    } else {
        rep.check("equivalence classes", true, class_detail.join(", "));
    }

    if opts.compare_parallel && n >= 7 {
        let mut cfg = SearchConfig::new(n, d_min);
        cfg.parallel_depth = 4;
        let par = search(&cfg)?;
        rep.check(
            "parallel search agrees",
            serialized(&par.candidates) == serialized(cands),
            format!("{} candidates, depth 4", par.candidates.len()),
        );
    }
    rep.wall_secs = t.elapsed().as_secs_f64();
    Ok(rep)
}

/// Order-19 reference matrices and the Ehlich block scan above them.
pub fn verify_19(opts: &VerifyOptions) -> Result<VerifyReport> {
    let t = Instant::now();
    let mut rep = VerifyReport::new("n=19".into());
    let fixtures = order_19_candidates();
    let target = fixtures[0].sqrt_det();
    for f in &fixtures {
        rep.check(
            &format!("{} determinant", f.name),
            f.gram.sqrt_det() == Some(target.clone()),
            format!("sqrt(det) = {}", f.gram.sqrt_det().map_or("not a square".into(), |s| s.to_string())),
        );
        rep.check(
            &format!("{} class membership", f.name),
            check_class(f.gram.matrix(), 19).is_ok(),
            "positive definite, diagonal 19, entries = 3 mod 4",
        );
    }
    let hits = ehlich_block_scan(19, &target)?;
    let above: Vec<_> = hits.iter().filter(|h| h.sqrt_det > target).collect();
    rep.check(
        "no Ehlich block matrix above",
        above.is_empty(),
        format!("{} square determinants at or above, {} strictly above", hits.len(), above.len()),
    );
    if opts.extended {
        for f in &fixtures {
            let p = DecompositionProblem::new(f.gram.clone(), f.gram.clone())?;
            let r = full_decompose(&p, &DecomposeConfig::existence())?;
            rep.check(
                &format!("{} decomposes", f.name),
                r.verdict == Verdict::Witness && r.witnesses.iter().all(|w| verify_witness(w, &p)),
                format!("{}", r.verdict),
            );
        }
    }
    rep.wall_secs = t.elapsed().as_secs_f64();
    Ok(rep)
}

/// Range certification for orders 9 and 11.
pub fn verify_range(n: usize) -> Result<VerifyReport> {
    let Some(floor) = range_gap_floor(n) else {
        bail!("no determinant range to certify for order {n}");
    };
    let t = Instant::now();
    let mut rep = VerifyReport::new(format!("range n={n}"));
    let s = range_certify(n, floor)?;
    let got: Vec<(u64, usize)> = s.found.iter().map(|v| (v.value, v.candidates)).collect();
    let mut want: Vec<(u64, usize)> = if n == 9 {
        ORDER_9_RANGE_COUNTS.to_vec()
    } else {
        ORDER_11_RANGE_COUNTS.to_vec()
    };
    want.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    let shown: Vec<String> = got.iter().map(|(v, k)| format!("{v}:{k}")).collect();
    rep.check(
        "multiplicities",
        got == want,
        format!("{} candidates; {}", s.total_candidates, shown.join(" ")),
    );
    let examined: Vec<String> = s
        .certification
        .iter()
        .filter(|c| c.candidates > 0)
        .map(|c| format!("{}:{:?}", c.value, c.evidence))
        .collect();
    rep.check(
        "gaps certified",
        s.complete,
        format!(
            "{} gap values at or above {floor}; with candidates: {}",
            s.certification.len(),
            if examined.is_empty() { "none".into() } else { examined.join(" ") }
        ),
    );
    if n == 11 {
        let need = [300u64, 306, 324];
        let ok = need.iter().all(|v| {
            s.certification
                .iter()
                .any(|c| c.value == *v && c.evidence == Evidence::NoDecomposition)
        });
        rep.check("300, 306 and 324 do not decompose", ok, "every charpoly pairing is none");
        let mut fixtures_ok = true;
        for f in order_11_gap_candidates() {
            let p = DecompositionProblem::new(f.gram.clone(), f.gram.clone())?;
            let r = full_decompose(&p, &DecomposeConfig::default())?;
            fixtures_ok &= r.verdict == Verdict::None && r.certificate.eliminations_confirmed;
        }
        rep.check("listed 300 and 306 matrices do not decompose", fixtures_ok, "four matrices");
    }
    rep.wall_secs = t.elapsed().as_secs_f64();
    Ok(rep)
}

/// Orders covered by `verify all`.
pub fn suite(extended: bool) -> Vec<String> {
    let mut v: Vec<String> = LISTED_ORDERS
        .iter()
        .filter(|&&n| extended || n != 15)
        .map(|n| n.to_string())
        .collect();
    v.push("19".into());
    v.push("range9".into());
    if extended {
        v.push("range11".into());
    }
    v
}

/// Runs one target: an order, `rangeN`, or `all`.
pub fn run(target: &str, opts: &VerifyOptions) -> Result<Vec<VerifyReport>> {
    if target == "all" {
        return suite(opts.extended).iter().map(|t| run(t, opts).map(|mut r| r.remove(0))).collect();
    }
    if let Some(rest) = target.strip_prefix("range") {
        return Ok(vec![verify_range(rest.parse()?)?]);
    }
    let n: usize = target.parse()?;
    let mut out = Vec::new();
    if n == 19 {
        out.push(verify_19(opts)?);
    } else {
        out.push(verify_listed(n, opts)?);
    }
    Ok(out)
}
