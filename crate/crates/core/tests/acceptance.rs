//! Acceptance suite: one line per criterion, then a hard failure if any
//! criterion missed. Run with `cargo test --test acceptance -- --nocapture`
//! to see the table.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use gramsey::largeness::{self, Family, Seq};
use gramsey::linalg::{self, IprCertificate};
use gramsey::search::{self, Coloring, ColoringRule, ProofcheckBranch, SearchOutcome};
use gramsey::{GaussInt, GaussRational, GaussSet, MatrixQi, SetRule, VectorZi, Window};
use num_bigint::BigInt;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    check(t < limit, || format!("runtime {t:.2?} exceeds {limit:?}"))
}

fn q(n: P, d: i64) -> GaussRational {
    GaussRational::new(gi(n), d).unwrap()
}

fn random_rational_matrix(rng: &mut rand_chacha::ChaCha8Rng) -> MatrixQi {
    let u = rng.random_range(1..=5);
    let v = rng.random_range(1..=5);
    let mut rows: Vec<Vec<GaussRational>> = (0..u)
        .map(|_| {
            (0..v)
                .map(|_| q(random_point(rng, 10), rng.random_range(1..=10)))
                .collect()
        })
        .collect();
    // Force dependent rows some of the time so both branches occur.
    if u >= 2 && rng.random_bool(0.4) {
        let c = q(random_point(rng, 3), rng.random_range(1..=3));
        let base = rows[0].clone();
        rows[u - 1] = base.iter().map(|e| e * &c).collect();
    }
    MatrixQi::from_rows(rows).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(1);
    let (mut sols, mut obs) = (0, 0);
    for case in 0..500 {
        let a = random_rational_matrix(&mut rng);
        let s = linalg::solve_all_ones(&a);
        let u = linalg::find_obstruction(&a);
        check(s.is_some() != u.is_some(), || format!("case {case}: branches {s:?} / {u:?}"))?;
        let cert = linalg::certify(&a);
        match &cert {
            IprCertificate::Solution(s) => {
                sols += 1;
                for r in 0..a.rows() {
                    let mut acc = GaussRational::zero();
                    for c in 0..a.cols() {
                        acc = &acc + &(a.get(r, c) * &s[c]);
                    }
                    check(acc == GaussRational::one(), || format!("case {case}: row {r} gives {acc}"))?;
                }
            }
            IprCertificate::Obstruction(u) => {
                obs += 1;
                for c in 0..a.cols() {
                    let mut acc = GaussRational::zero();
                    for r in 0..a.rows() {
                        acc = &acc + &(&GaussRational::from(u[r].clone()) * a.get(r, c));
                    }
                    check(acc.is_zero(), || format!("case {case}: column {c} gives {acc}"))?;
                }
                let dot = u.iter().fold(GaussInt::zero(), |acc, e| acc + e.clone());
                check(!dot.is_zero(), || format!("case {case}: u·1 = 0"))?;
            }
        }
        check(linalg::verify_certificate(&a, &cert), || format!("case {case}: library verifier rejected"))?;
    }
    within(start, Duration::from_secs(30))?;
    check(sols > 0 && obs > 0, || format!("only one branch exercised ({sols}/{obs})"))?;
    Ok(format!("500 matrices, {sols} solutions, {obs} obstructions, {:.2?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let mut rng = rng(2);
    for case in 0..10_000 {
        let a = gi(random_point(&mut rng, 1_000_000));
        let mut bp = random_point(&mut rng, 1_000);
        if bp == (0, 0) {
            bp = (1, 0);
        }
        let b = gi(bp);
        let (qq, r) = a.div_rem(&b).unwrap();
        check(&qq * &b + r.clone() == a, || format!("case {case}: {a} != {qq}·{b} + {r}"))?;
        let two: BigInt = 2.into();
        check(r.norm() * two <= b.norm(), || format!("case {case}: remainder {r} too large for {b}"))?;
    }

    // Canonical divisors of each element of norm <= 200, as bitsets.
    let elems = disc(200);
    let canon: Vec<P> = elems.iter().copied().filter(|&p| p != (0, 0) && canonical(p) == p).collect();
    let words = canon.len().div_ceil(64);
    let divisor_bits = |z: P| {
        let mut bits = vec![0u64; words];
        for (k, &d) in canon.iter().enumerate() {
            if divides(d, z) {
                bits[k / 64] |= 1 << (k % 64);
            }
        }
        bits
    };
    let table: Vec<Vec<u64>> = elems.iter().map(|&z| divisor_bits(z)).collect();
    let mut pairs = 0u64;
    for (i, &a) in elems.iter().enumerate() {
        for (j, &b) in elems.iter().enumerate() {
            let got = gi(a).gcd(&gi(b));
            if a == (0, 0) && b == (0, 0) {
                check(got.is_err(), || "gcd(0, 0) must be an error".into())?;
                continue;
            }
            let common: Vec<P> = (0..canon.len())
                .filter(|&k| table[i][k / 64] & table[j][k / 64] & (1 << (k % 64)) != 0)
                .map(|k| canon[k])
                .collect();
            let best = *common.iter().max_by_key(|&&d| norm(d)).unwrap();
            check(common.iter().all(|&d| divides(d, best)), || format!("no greatest divisor for {a:?}, {b:?}"))?;
            let got = got.unwrap();
            check(got == gi(best), || format!("gcd({}, {}) = {got}, oracle {}", gi(a), gi(b), gi(best)))?;
            pairs += 1;
        }
    }
    Ok(format!("10000 div_rem pairs, {pairs} gcd pairs"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    let mut primes = 0;
    for z in disc(10_000) {
        let lib = gi(z).is_gaussian_prime();
        let oracle = prime_oracle(z);
        check(lib == oracle, || format!("{}: library {lib}, oracle {oracle}", gi(z)))?;
        count += 1;
        primes += usize::from(lib);
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{count} elements, {primes} primes, {:.2?}", start.elapsed()))
}

fn criterion_4() -> Outcome {
    let mut rng = rng(4);
    let mut done = 0;
    let mut attempts = 0;
    while done < 100 {
        attempts += 1;
        let len = rng.random_range(2..=8);
        let xs: Vec<GaussInt> = (0..len).map(|_| gi(random_point(&mut rng, 6))).collect();
        let Ok(seq) = Seq::new(xs) else { continue };
        let Ok(ys) = largeness::partial_sums(&seq) else { continue };
        let d = largeness::delta(&ys).unwrap();
        // Finite sums by an independent subset loop.
        let mut sums = BTreeSet::new();
        for mask in 1u32..(1 << len) {
            let s = (0..len)
                .filter(|k| mask & (1 << k) != 0)
                .fold(GaussInt::zero(), |acc, k| acc + seq.as_slice()[k].clone());
            sums.insert(s);
        }
        check(largeness::fs(&seq).unwrap() == sums, || format!("fs mismatch on {seq:?}"))?;
        check(d.is_subset(&sums), || format!("delta(partial_sums({seq:?})) not in fs"))?;
        done += 1;
    }
    Ok(format!("100 sequences ({attempts} drawn)"))
}

#[derive(Default)]
struct Tally {
    checks: u64,
    positive: u64,
}

impl Tally {
    fn record(&mut self, v: bool) {
        self.checks += 1;
        self.positive += u64::from(v);
    }
}

fn criterion_5() -> Outcome {
    let mut rng = rng(5);
    let densities = [(1, 4), (1, 2), (3, 4), (7, 8), (15, 16), (31, 32), (1, 1)];
    let mut tally = Tally::default();
    for radius in 1..=6u32 {
        for sample in 0..200 {
            let (num, den) = densities[sample % densities.len()];
            let window = Window::new(radius, rng.random_bool(0.5)).unwrap();
            let rule = SetRule::Random {
                seed: Some(rng.random()),
                numerator: num,
                denominator: den,
            };
            let set = GaussSet::from_rule(window, &rule, 0).unwrap();
            let comp = set.complement();
            let ctx = |what: &str| format!("radius {radius}, sample {sample}: {what}");
            let r = radius as i64;
            for g in 1..=r {
                let lib = largeness::is_syndetic(&set, g as u32).unwrap().is_some();
                check(lib == syndetic_oracle(&set, g), || ctx(&format!("syndetic g={g}")))?;
                tally.record(lib);
            }
            for g in 1..r {
                for f in 1..(r - g) {
                    let lib = largeness::is_piecewise_syndetic(&set, g as u32, f as u32).unwrap().is_some();
                    check(lib == ps_oracle(&set, g, f), || ctx(&format!("ps g={g} f={f}")))?;
                    tally.record(lib);
                    let star = largeness::is_piecewise_syndetic(&comp, g as u32, f as u32).unwrap().is_none();
                    check(star == !ps_oracle(&comp, g, f), || ctx(&format!("ps* g={g} f={f}")))?;
                    tally.record(star);
                }
            }
            for f in 1..r {
                let lib = largeness::is_thick(&set, f as u32).unwrap().is_some();
                check(lib == thick_oracle(&set, f), || ctx(&format!("thick f={f}")))?;
                tally.record(lib);
            }
            let ip_depths: &[usize] = if radius <= 3 { &[1, 2, 3] } else { &[1, 2] };
            for &k in ip_depths {
                let lib = largeness::contains_ip(&set, k).unwrap().is_some();
                check(lib == ip_oracle(&set, k), || ctx(&format!("ip k={k}")))?;
                tally.record(lib);
                let star = largeness::is_star_k(&set, Family::Ip, k).unwrap();
                check(star == !ip_oracle(&comp, k), || ctx(&format!("ip* k={k}")))?;
                tally.record(star);
            }
            let delta_depths: &[usize] = if radius <= 3 { &[2, 3, 4] } else { &[2, 3] };
            for &k in delta_depths {
                let lib = largeness::contains_delta(&set, k).unwrap().is_some();
                check(lib == delta_oracle(&set, k), || ctx(&format!("delta k={k}")))?;
                tally.record(lib);
                let star = largeness::is_star_k(&set, Family::Delta, k).unwrap();
                check(star == !delta_oracle(&comp, k), || ctx(&format!("delta* k={k}")))?;
                tally.record(star);
            }
        }
    }
    check(tally.positive > 0 && tally.positive < tally.checks, || "degenerate sample".into())?;
    Ok(format!(
        "1200 sets, {} detector checks ({} positive)",
        tally.checks, tally.positive
    ))
}

fn criterion_6() -> Outcome {
    let mut rng = rng(6);
    let ls: Vec<GaussInt> = {
        let mut v: Vec<P> = disc(10).into_iter().filter(|&p| p != (0, 0)).collect();
        v.sort_by_key(|&p| (norm(p), p));
        v.into_iter().take(20).map(gi).collect()
    };
    let (mut matrices, mut identities) = (0, 0);
    for case in 0..40 {
        let u = rng.random_range(1..=4);
        let v = rng.random_range(1..=4);
        let mut raw = RawMatrix::random(&mut rng, u, v, 5, 1);
        if case % 2 == 0 {
            let col = rng.random_range(0..v);
            for row in raw.rows.iter_mut() {
                row[col] = ((1, 0), 1);
            }
        }
        let a = raw.to_matrix();
        let Some(s) = linalg::solve_all_ones(&a) else { continue };
        let mut used = false;
        for l in &ls {
            let ws: Option<Vec<GaussInt>> = s
                .iter()
                .map(|e| (&GaussRational::from(l.clone()) * e).to_gauss_int())
                .collect();
            let Some(ws) = ws else { continue };
            let w = VectorZi::new(ws).unwrap();
            used = true;
            for trial in 0..50 {
                let t = gi(random_point(&mut rng, 20));
                let x = VectorZi::new((0..v).map(|_| gi(random_point(&mut rng, 20))).collect()).unwrap();
                let ok = linalg::verify_translation_identity(&a, &w, l, &t, &x).unwrap();
                check(ok, || format!("case {case}, l = {l}, trial {trial}"))?;
                identities += 1;
            }
        }
        matrices += usize::from(used);
    }
    check(matrices >= 10, || format!("only {matrices} matrices had integral solutions"))?;
    Ok(format!("{matrices} matrices, {identities} identities"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    for rows in [[(1, 0), (2, 0)], [(0, 1), (0, 2)]] {
        let raw = RawMatrix {
            rows: rows.iter().map(|&p| vec![(p, 1)]).collect(),
        };
        let a = raw.to_matrix();
        for l in [g("1"), g("1+i")] {
            let rep = search::congruence_proofcheck(&a, &l, 12).map_err(|e| e.to_string())?;
            let ProofcheckBranch::Obstruction {
                obstruction,
                prime,
                images_in_p,
                annihilated,
                scanned,
                ..
            } = &rep.branch
            else {
                return Err(format!("{rows:?}, l = {l}: solution branch"));
            };
            let r = prime.to_xy().unwrap();
            let lp = l.to_xy().unwrap();
            let dot = obstruction.iter().fold((0, 0), |acc, e| add(acc, e.to_xy().unwrap()));
            check(prime_oracle(r), || format!("{prime} is not prime"))?;
            check(norm(r) > norm(lp) && norm(r) > norm(mul(lp, dot)), || format!("{prime} too small for l = {l}"))?;
            // Independent scan of the box for A·z ∈ P^u.
            let mut hits = 0;
            for z in square(12) {
                let img = raw.exact_image(&[z]).unwrap();
                if img
                    .iter()
                    .all(|&t| t != (0, 0) && divides(r, (t.0 - lp.0, t.1 - lp.1)))
                {
                    hits += 1;
                }
            }
            check(hits == 0 && *images_in_p == 0, || format!("{hits} oracle hits, {images_in_p} reported"))?;
            check(annihilated == scanned, || "u·(A·z) nonzero somewhere".into())?;
            lines.push(format!("r={prime}"));
        }
    }
    within(start, Duration::from_secs(20))?;
    Ok(format!("4 cases, zero counterexamples ({}), {:.2?}", lines.join(" "), start.elapsed()))
}

fn criterion_8() -> Outcome {
    let mut rng = rng(8);
    let (mut found, mut absent) = (0, 0);
    for case in 0..50 {
        let u = rng.random_range(1..=3);
        let v = rng.random_range(1..=2);
        let raw = RawMatrix::random(&mut rng, u, v, 3, if case % 5 == 0 { 2 } else { 1 });
        let a = raw.to_matrix();
        let window = Window::new(rng.random_range(3..=8), rng.random_bool(0.5)).unwrap();
        let colors = rng.random_range(1..=4);
        let coloring = Coloring::from_rule(window, colors, &ColoringRule::Random { seed: Some(rng.random()) }, 0).unwrap();
        let radius = rng.random_range(1..=6);
        let outcome = search::search_monochromatic(&a, &coloring, radius).unwrap();
        let (_, b) = raw.cleared();
        let oracle = monochromatic_oracle(&b, &coloring, radius as i64);
        match &outcome {
            SearchOutcome::Found(cert) => {
                found += 1;
                check(oracle, || format!("case {case}: found but oracle says absent"))?;
                check(search::verify_image_certificate(&a, &coloring, cert), || format!("case {case}: bad certificate"))?;
            }
            _ => {
                absent += 1;
                check(!oracle, || format!("case {case}: oracle found an image the search missed"))?;
            }
        }
    }
    check(found > 0 && absent > 0, || format!("one-sided sample ({found}/{absent})"))?;
    Ok(format!("50 colorings, {found} found, {absent} absent"))
}

fn criterion_9() -> Outcome {
    let mut rng = rng(9);
    let mut checked = 0u64;
    let rules = [
        SetRule::ResidueClass {
            modulus: g("2+i"),
            residue: g("1"),
        },
        SetRule::ResidueClass {
            modulus: g("1+i"),
            residue: g("0"),
        },
        SetRule::RealParity { parity: 0 },
        SetRule::Random {
            seed: Some(99),
            numerator: 2,
            denominator: 3,
        },
    ];
    for radius in [2u32, 5, 8] {
        for rule in &rules {
            for _ in 0..3 {
                let v = rng.random_range(1..=2);
                let u = rng.random_range(1..=3);
                let raw = RawMatrix::random(&mut rng, u, v, 2, 2);
                let a = raw.to_matrix();
                let c = GaussSet::from_rule(Window::new(12, rng.random_bool(0.5)).unwrap(), rule, 0).unwrap();
                let got: HashSet<Vec<P>> = search::preimage_set(&a, &c, radius)
                    .unwrap()
                    .iter()
                    .map(|z| z.iter().map(|e| e.to_xy().unwrap()).collect())
                    .collect();
                let coords: Vec<P> = square(radius as i64).into_iter().filter(|&p| p != (0, 0)).collect();
                let all: Vec<Vec<P>> = if v == 1 {
                    coords.iter().map(|&p| vec![p]).collect()
                } else {
                    coords.iter().flat_map(|&p| coords.iter().map(move |&q| vec![p, q])).collect()
                };
                for z in all {
                    let member = raw
                        .exact_image(&z)
                        .is_some_and(|img| img.iter().all(|&t| c.contains(t)));
                    check(member == got.contains(&z), || format!("{rule:?}, radius {radius}: z = {z:?}"))?;
                    checked += 1;
                }
                check(got.iter().all(|z| z.iter().all(|&p| p != (0, 0))), || "zero coordinate in W".into())?;
            }
        }
    }
    Ok(format!("{checked} candidate vectors compared"))
}

struct Cli {
    dir: PathBuf,
}

impl Cli {
    fn new() -> Self {
        let dir = std::env::temp_dir().join(format!("gramsey-acceptance-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Cli { dir }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> (i32, Vec<u8>) {
        let out = Command::new(env!("CARGO_BIN_EXE_gramsey"))
            .args(args)
            .current_dir(&self.dir)
            .output()
            .unwrap();
        (out.status.code().unwrap_or(-1), out.stdout)
    }

    fn path<'a>(&self, p: &'a Path) -> &'a str {
        p.to_str().unwrap()
    }
}

impl Drop for Cli {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.dir);
    }
}

fn criterion_10() -> Outcome {
    let cli = Cli::new();
    let prog = cli.file("prog.txt", "4 2\n1 0\n1 1\n1 2\n1 3\n");
    let m12 = cli.file("m12.txt", "2 1\n1\n2\n");
    let mi = cli.file("mi.txt", "2 1\ni\n2i\n");
    let parity = cli.file("parity.json", r#"{"window": {"radius": 16}, "colors": 2, "rule": {"kind": "real-parity"}}"#);
    let random = cli.file("random.json", r#"{"window": {"radius": 6, "include_zero": false}, "colors": 3, "rule": {"kind": "random"}}"#);
    let even = cli.file("even.json", r#"{"window": {"radius": 6}, "rule": {"kind": "real-parity", "parity": 0}}"#);
    let rand_set = cli.file("rset.json", r#"{"window": {"radius": 5}, "rule": {"kind": "random", "numerator": 3, "denominator": 4}}"#);
    let empty = cli.file("empty.json", r#"{"window": {"radius": 6}, "points": []}"#);
    let (p, m, mi_, par, rnd, ev, rs, em) = (
        cli.path(&prog),
        cli.path(&m12),
        cli.path(&mi),
        cli.path(&parity),
        cli.path(&random),
        cli.path(&even),
        cli.path(&rand_set),
        cli.path(&empty),
    );
    let commands: Vec<(Vec<&str>, i32)> = vec![
        (vec!["certify", p], 0),
        (vec!["certify", m], 2),
        (vec!["certify", mi_], 2),
        (vec!["search", p, par, "--search-radius", "16"], 0),
        (vec!["search", p, rnd, "--search-radius", "3", "--seed", "7"], 0),
        (vec!["search", m, rnd, "--search-radius", "2", "--seed", "11"], 0),
        (vec!["search", p, par, "--search-radius", "2", "--radius", "1"], 3),
        (vec!["classify", ev, "--depth", "2"], 0),
        (vec!["classify", rs, "--depth", "3", "--g-radius", "1", "--f-radius", "2", "--seed", "3"], 0),
        (vec!["experiment", "abundance", p, ev, "--search-radius", "3"], 0),
        (vec!["experiment", "preservation", m, em, "--family", "delta", "--search-radius", "3"], 0),
        (vec!["experiment", "preservation", m, ev, "--family", "thick", "--search-radius", "3"], 0),
        (vec!["experiment", "proofcheck", m, "--l", "1", "--search-radius", "12"], 0),
        (vec!["matrix", "progression", "--length", "3"], 0),
    ];
    let mut verified = 0;
    for (k, (args, expect)) in commands.iter().enumerate() {
        let (c1, o1) = cli.run(args);
        let (c2, o2) = cli.run(args);
        check(c1 == *expect, || format!("{args:?}: exit {c1}, expected {expect}"))?;
        check(c1 == c2 && o1 == o2, || format!("{args:?}: outputs differ between runs"))?;
        // Same bytes through --out.
        let out = cli.dir.join(format!("out{k}.json"));
        let mut with_out: Vec<&str> = args.clone();
        with_out.extend(["--out", cli.path(&out)]);
        if args[0] != "matrix" {
            let (c3, _) = cli.run(&with_out);
            check(c3 == c1, || format!("{args:?}: exit changed with --out"))?;
            check(std::fs::read(&out).unwrap() == o1, || format!("{args:?}: --out bytes differ"))?;
            let is_cert = (args[0] == "certify") || (args[0] == "search" && c1 == 0);
            if is_cert {
                let (code, _) = cli.run(&[args[0], "--verify", cli.path(&out)]);
                check(code == 0, || format!("{args:?}: --verify rejected its certificate"))?;
                verified += 1;
            }
        }
    }
    // A tampered certificate must be rejected.
    let cert = cli.dir.join("tamper.json");
    cli.run(&["search", p, par, "--search-radius", "16", "--out", cli.path(&cert)]);
    let mut doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&cert).unwrap()).unwrap();
    doc["certificate"]["z"][0] = "7".into();
    let bad = cli.file("bad.json", &doc.to_string());
    let (code, _) = cli.run(&["search", "--verify", cli.path(&bad)]);
    check(code == 4, || format!("tampered certificate exit {code}"))?;
    Ok(format!("{} commands byte-identical, {verified} certificates re-verified", commands.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("alternative dichotomy", criterion_1),
        ("euclidean division and gcd", criterion_2),
        ("gaussian primality", criterion_3),
        ("IP implies delta", criterion_4),
        ("detector/oracle equivalence", criterion_5),
        ("translation identity", criterion_6),
        ("congruence proof-check", criterion_7),
        ("search exhaustiveness", criterion_8),
        ("preimage correctness", criterion_9),
        ("CLI determinism and verify", criterion_10),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.2?}]", k + 1, start.elapsed()),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why} [{:.2?}]", k + 1, start.elapsed());
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
