//! Acceptance run: one PASS/FAIL line per criterion. Criteria run on
//! separate threads and report in order.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use maxdet::bounds::{barba_bound, best_bound, ehlich_mod4_3_bound, known_max_det};
use maxdet::decompose::{
    full_decompose, signature_solutions, CellStructure, DecomposeConfig, DecompositionProblem, Verdict,
};
use maxdet::detrange::to_zero_one;
use maxdet::gram::{brute_force_lex_max, check_class, is_lex_max, phi, CandidateGram};
use maxdet::known::{listed_candidates, order_19_candidates, KnownCandidate};
use maxdet::linalg::{char_poly, det_exact, gram_cols, gram_rows, IntMatrix, SignMatrix};
use maxdet::search::oracle::reference_search;
use maxdet::search::{search, BoundMode, SearchConfig};
use maxdet_cli::verify::{verify_19, verify_listed, verify_range, VerifyOptions, VerifyReport};

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_reports(reports: &[VerifyReport], limit: Duration, started: Instant) -> Outcome {
    let secs = started.elapsed();
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| r.checks.iter().filter(|c| !c.pass).map(move |c| format!("{} {}", r.target, c.name)))
        .collect();
    let pass = failed.is_empty() && secs <= limit;
    let detail = if failed.is_empty() {
        format!("{} checks, {:.1}s (limit {}s)", reports.iter().map(|r| r.checks.len()).sum::<usize>(), secs.as_secs_f64(), limit.as_secs())
    } else {
        format!("failed: {}", failed.join("; "))
    };
    Outcome { pass, detail }
}

fn quick() -> VerifyOptions {
    VerifyOptions {
        extended: false,
        compare_parallel: false,
    }
}

fn crit1() -> Outcome {
    let t = Instant::now();
    let reps: Vec<VerifyReport> = [3, 7, 9].iter().map(|&n| verify_listed(n, &quick()).unwrap()).collect();
    from_reports(&reps, Duration::from_secs(10), t)
}

fn crit2() -> Outcome {
    let t = Instant::now();
    let r = verify_listed(11, &quick()).unwrap();
    from_reports(&[r], Duration::from_secs(300), t)
}

fn crit3() -> Outcome {
    let t = Instant::now();
    let opts = VerifyOptions {
        extended: true,
        compare_parallel: true,
    };
    let r = verify_listed(15, &opts).unwrap();
    from_reports(&[r], Duration::from_secs(7200), t)
}

fn named<'a>(list: &'a [KnownCandidate], name: &str) -> &'a CandidateGram {
    &list.iter().find(|c| c.name == name).expect("listed").gram
}

/// The extra pairs that the newly found candidates add: each must be none.
fn extra_pairs(n: usize, pairs: &[(&str, &str)]) -> (bool, String) {
    let list = listed_candidates(n).unwrap();
    let mut ok = true;
    let mut out = Vec::new();
    for (a, b) in pairs {
        let p = DecompositionProblem::new(named(&list, a).clone(), named(&list, b).clone()).unwrap();
        let r = full_decompose(&p, &DecomposeConfig::default()).unwrap();
        ok &= r.verdict == Verdict::None && r.certificate.eliminations_confirmed;
        out.push(format!("({a},{b}) {} at {:?}", r.verdict, r.certificate.stage));
    }
    (ok, out.join("; "))
}

fn crit_with_pairs(n: usize, pairs: &[(&str, &str)]) -> Outcome {
    let t = Instant::now();
    let r = verify_listed(n, &quick()).unwrap();
    let mut o = from_reports(&[r], Duration::from_secs(1800), t);
    let (ok, detail) = extra_pairs(n, pairs);
    o.pass &= ok;
    o.detail = format!("{}; {detail}", o.detail);
    o
}

fn crit4() -> Outcome {
    crit_with_pairs(17, &[("M17_5", "M17_5"), ("M17_1", "M17_1"), ("M17_5", "M17_2")])
}

fn crit5() -> Outcome {
    crit_with_pairs(21, &[("M21_1", "M21_1"), ("M21_3", "M21_3"), ("M21_1", "M21_3")])
}

fn crit6() -> Outcome {
    let t = Instant::now();
    let r = verify_19(&quick()).unwrap();
    let ok = order_19_candidates().len() == 2;
    let mut o = from_reports(&[r], Duration::from_secs(60), t);
    o.pass &= ok;
    o
}

fn crit7() -> Outcome {
    let t = Instant::now();
    from_reports(&[verify_range(9).unwrap()], Duration::from_secs(60), t)
}

fn crit8() -> Outcome {
    let t = Instant::now();
    from_reports(&[verify_range(11).unwrap()], Duration::from_secs(4 * 3600), t)
}

fn run_search(n: usize, d: &BigInt, mode: BoundMode) -> Vec<(IntMatrix, BigInt)> {
    let mut cfg = SearchConfig::new(n, d.clone());
    cfg.bound_mode = mode;
    search(&cfg)
        .unwrap()
        .candidates
        .into_iter()
        .map(|c| (c.matrix().clone(), c.det().clone()))
        .collect()
}

fn random_sign(rng: &mut ChaCha8Rng, n: usize) -> SignMatrix {
    SignMatrix::new(n, (0..n * n).map(|_| if rng.gen() { 1 } else { -1 }).collect()).unwrap()
}

fn crit9() -> Outcome {
    let t = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    let mut note = |name: &str, ok: bool| {
        pass &= ok;
        parts.push(format!("{name} {}", if ok { "ok" } else { "FAILED" }));
    };

    // Search against the reference enumeration.
    let mut ok = true;
    for (n, ds) in [(3usize, vec![1u64, 4]), (5, vec![1, 2, 48]), (7, vec![1, 200, 400, 576])] {
        for d in ds {
            let d = BigInt::from(d);
            let want = reference_search(n, &d);
            ok &= run_search(n, &d, BoundMode::Theorem) == want;
        }
    }
    note("search = reference (n=3,5,7)", ok);

    // Pruning off changes nothing.
    let d7 = BigInt::from(1);
    let d9 = BigInt::from(41 * 256);
    let ok = run_search(7, &d7, BoundMode::Off) == run_search(7, &d7, BoundMode::Theorem)
        && run_search(9, &d9, BoundMode::Off) == run_search(9, &d9, BoundMode::Theorem);
    note("pruning-off invariance (n=7,9)", ok);

    // IsLexMax against all p! permutations.
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut tested = 0;
    let mut ok = true;
    while tested < 400 {
        let n = [9usize, 11, 13, 15][rng.gen_range(0..4)];
        let p = rng.gen_range(3..=7);
        let vals = phi(n);
        let m = IntMatrix::from_fn(p, p, |_, _| 0);
        let mut m = m;
        for i in 0..p {
            m.set(i, i, n as i128);
            for j in 0..i {
                let v = if rng.gen_bool(0.6) { vals[0] } else { vals[rng.gen_range(0..vals.len().min(3))] };
                m.set(i, j, v as i128);
                m.set(j, i, v as i128);
            }
        }
        if check_class(&m, n).is_err() {
            continue;
        }
        tested += 1;
        ok &= is_lex_max(&m) == (brute_force_lex_max(&m) == m);
    }
    note("IsLexMax = brute force (p<=7, 400 blocks)", ok);

    // Signature solutions against all 2^15 vectors.
    let b = maxdet::gram::construct_ehlich_block(15, &[4, 4, 4, 3]).unwrap();
    let cells = CellStructure::new(b.matrix()).unwrap();
    let sq = b.matrix().mul(b.matrix()).unwrap();
    let mut ok = true;
    for row in [0usize, 14] {
        let rhs = sq.get(row, row) as i64;
        let mut want = std::collections::BTreeSet::new();
        for mask in 0u32..1 << 15 {
            if mask.count_ones() % 2 == 1 {
                continue;
            }
            let x: Vec<i8> = (0..15).map(|k| if mask >> k & 1 == 1 { 1 } else { -1 }).collect();
            let q: i64 = (0..15)
                .flat_map(|i| (0..15).map(move |j| (i, j)))
                .map(|(i, j)| b.matrix().get(i, j) as i64 * x[i] as i64 * x[j] as i64)
                .sum();
            if q == rhs {
                want.insert(cells.sums(&x));
            }
        }
        let got: std::collections::BTreeSet<Vec<i64>> =
            signature_solutions(&cells, rhs).into_iter().map(|s| s.sums).collect();
        ok &= got == want && rhs - 180 == if row == 0 { 83 } else { 75 };
    }
    note("signatures = 2^15 enumeration (83, 75)", ok);

    // Gram characteristic polynomials and 2^{n-1} divisibility.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut ok = true;
    for _ in 0..100 {
        let n = rng.gen_range(2..=12);
        let r = random_sign(&mut rng, n);
        ok &= char_poly(&gram_rows(&r)).unwrap() == char_poly(&gram_cols(&r)).unwrap();
    }
    note("charpoly(RRt) = charpoly(RtR)", ok);
    let mut ok = true;
    for _ in 0..400 {
        let n = [5usize, 7, 9, 11][rng.gen_range(0..4)];
        let r = random_sign(&mut rng, n);
        let d = r.det();
        let scale = pow(BigInt::from(2), n - 1);
        ok &= (&d % &scale).is_zero() && det_exact(&to_zero_one(&r)).unwrap() * scale == d;
    }
    note("2^(n-1) divides det", ok);

    let secs = t.elapsed();
    pass &= secs <= Duration::from_secs(600);
    Outcome {
        pass,
        detail: format!("{}; {:.1}s (limit 600s)", parts.join(", "), secs.as_secs_f64()),
    }
}

fn crit10() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    for n in (1..=21).step_by(2) {
        let md = known_max_det(n).or_else(|| (n == 19).then(|| BigInt::from(833) * pow(BigInt::from(4), 6) * pow(BigInt::from(2), 18)));
        let md = md.expect("value known for odd n <= 21");
        ok &= best_bound(n).unwrap().floor_value >= md;
    }
    for n in [1usize, 5, 13] {
        let b = barba_bound(n).unwrap();
        ok &= b.is_integral && Some(b.floor_value) == known_max_det(n);
    }
    for n in [7usize, 11, 15, 19] {
        ok &= !ehlich_mod4_3_bound(n).unwrap().is_integral;
    }
    let secs = t.elapsed();
    Outcome {
        pass: ok && secs <= Duration::from_secs(1),
        detail: format!("floors dominate md(n) for odd n <= 21, Barba attained at 1, 5, 13, mod-4 bound non-integral at 7, 11, 15, 19; {:.3}s", secs.as_secs_f64()),
    }
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("orders 3, 7, 9", crit1),
        ("order 11 candidates and verdicts", crit2),
        ("order 15 candidates, verdicts and uniqueness", crit3),
        ("order 17 candidates and verdicts", crit4),
        ("order 21 candidates and verdicts", crit5),
        ("order 19 reference matrices and Ehlich scan", crit6),
        ("order 9 determinant range", crit7),
        ("order 11 determinant range", crit8),
        ("property suites", crit9),
        ("bounds", crit10),
    ];
    let handles: Vec<_> = criteria
        .iter()
        .map(|&(_, f)| std::thread::spawn(move || std::panic::catch_unwind(f)))
        .collect();
    let mut all = true;
    for (k, (h, (name, _))) in handles.into_iter().zip(&criteria).enumerate() {
        let o = match h.join().expect("thread") {
            Ok(o) => o,
            Err(_) => Outcome {
                pass: false,
                detail: "panicked".into(),
            },
        };
        all &= o.pass;
        println!("criterion {:>2} [{}] {name}: {}", k + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}", if all { "all criteria passed" } else { "FAILED" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
