//! Acceptance suite: one `PASS`/`FAIL` line per criterion, with timings
//! and the pinned tolerances. Runs the `sfq` binary for the end-to-end
//! criteria and the library for the algebraic ones.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sfq::graph::{fmt_q, parse_q, q, Color, Edge, Graph, GraphVector, Vertex};
use sfq::homology::{hoch, homotopy_identity_check, is_invariant_vector, pi, pike_d, pike_h, to_invariant};
use sfq::induction::{connected_basis, level, stage_alpha2, StageState};
use sfq::io::{format_graph_vector, parse_table};
use sfq::kgra::{broom, broom_graph, gamma_edge};
use sfq::linalg::{enumerate_basis, solve_operator, symmetric_basis, Filters, LinalgError, Symmetry};
use sfq::oc::{boundary_value, gauge_apply, AlphaTable, ConvElement, Corolla};
use sfq::weight::estimate_weight_edges;

#[path = "../../sfq/tests/oracles/mod.rs"]
mod oracles;

/// Broom estimates must lie within this many standard errors of `1/k!`.
const WEIGHT_SIGMAS: f64 = 3.0;
/// ... and within this relative error.
const WEIGHT_RELATIVE: f64 = 0.02;
const WEIGHT_SAMPLES: u64 = 1_000_000;
const RANDOM_VECTORS: usize = 200;
const RANDOM_COCYCLES: usize = 50;

type Check = Result<String, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn sfq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfq")).args(args).output().expect("sfq binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn run_cli(nmax: u8, kmax: u8, out: &Path) -> Result<(AlphaTable, String), String> {
    let o = sfq(&["run", "--nmax", &nmax.to_string(), "--kmax", &kmax.to_string(), "--out", out.to_str().unwrap()]);
    ensure(o.status.success(), || format!("run {nmax},{kmax} exited {:?}: {}", o.status.code(), stdout(&o)))?;
    let text = std::fs::read_to_string(out.join("alpha.txt")).map_err(|e| e.to_string())?;
    let table = parse_table(&text).map_err(|e| e.to_string())?;
    Ok((table, text))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// A random vector on `nb` black and `nw` white vertices with up to
/// `max_edges` edges per graph and small rational coefficients.
fn random_vector(rng: &mut ChaCha8Rng, nb: u8, nw: u8, max_edges: usize) -> GraphVector {
    let mut v = GraphVector::zero(nb, nw, Color::Open);
    if nb == 0 {
        return GraphVector::single(Graph::empty(0, nw), q(rng.random_range(1..=5), 1), Color::Open);
    }
    for _ in 0..rng.random_range(1..=4) {
        let e = rng.random_range(0..=max_edges);
        let edges: Vec<Edge> = (0..e)
            .filter_map(|_| {
                let t = rng.random_range(1..=nb);
                let h = rng.random_range(1..=nb + nw);
                let head = if h <= nb { Vertex::Black(h) } else { Vertex::White(h - nb) };
                (head != Vertex::Black(t)).then_some((Vertex::Black(t), head))
            })
            .collect();
        let g = Graph::canonicalize(nb, nw, &edges).unwrap().with_color(Color::Open);
        v.add_scaled(&g, &q(rng.random_range(-6..=6), rng.random_range(1..=4)));
    }
    v
}

/// Every graph with `n ≤ 2`, `k ≤ 3`, `e ≤ 4`, plus the random corpus.
fn corpus() -> Vec<GraphVector> {
    let mut out = Vec::new();
    for n in 0..=2 {
        for k in 0..=3 {
            for e in 0..=4 {
                out.extend(enumerate_basis(n, k, e, Filters::NONE).vectors(Color::Open));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..RANDOM_VECTORS {
        let (nb, nw) = (rng.random_range(1..=3), rng.random_range(0..=4));
        out.push(random_vector(&mut rng, nb, nw, 6));
    }
    out
}

/// `𝔡 ∘ 𝔡` on an invariant vector with at least two white vertices.
fn pike_d_twice(g: &GraphVector) -> Result<GraphVector, String> {
    let once = pike_d(g).map_err(|e| e.to_string())?;
    pike_d(&once).map_err(|e| e.to_string())
}

fn operator_laws() -> Check {
    let start = Instant::now();
    let corpus = corpus();
    let exhaustive = corpus.len() - RANDOM_VECTORS;
    for v in &corpus {
        ensure(hoch(&hoch(v).unwrap()).unwrap().is_zero(), || format!("∂∂ ≠ 0 on\n{v}"))?;
    }
    let mut invariant = Vec::new();
    for n in 0..=2 {
        for k in 2..=3 {
            for e in 0..=4 {
                let b = enumerate_basis(n, k, e, Filters { white_univalent: true, ..Filters::NONE });
                invariant.extend(symmetric_basis(&b, Symmetry::BlackAltWhite, Color::Open));
            }
        }
    }
    let exhaustive_pike = invariant.len();
    invariant.extend(corpus[exhaustive..].iter().filter(|v| v.n_white() >= 2).map(to_invariant));
    for g in &invariant {
        ensure(pike_d_twice(g)?.is_zero(), || format!("𝔡𝔡 ≠ 0 on\n{g}"))?;
    }
    ensure(start.elapsed() < Duration::from_secs(60), || format!("took {:?}", start.elapsed()))?;
    Ok(format!(
        "∂∂=0 on {exhaustive} basis graphs + {RANDOM_VECTORS} random, 𝔡𝔡=0 on {exhaustive_pike} invariant basis vectors + {} random",
        invariant.len() - exhaustive_pike
    ))
}

fn projection_suite() -> Check {
    let corpus = corpus();
    for v in &corpus {
        let p = pi(v);
        ensure(pi(&p) == p, || format!("Π² ≠ Π on\n{v}"))?;
        ensure(hoch(&p).unwrap().is_zero(), || format!("∂Π ≠ 0 on\n{v}"))?;
        ensure(pi(&hoch(v).unwrap()).is_zero(), || format!("Π∂ ≠ 0 on\n{v}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut solved = 0;
    while solved < RANDOM_COCYCLES {
        let (n, k) = (rng.random_range(1..=2), rng.random_range(1..=3));
        let y = random_vector(&mut rng, n, k, 4);
        let z = random_vector(&mut rng, n, k - 1, 4);
        // c = Π(y) + ∂z, restricted to one edge count so the solve stays small
        let e = match z.graphs().next() {
            Some(g) => g.edge_count(),
            None => continue,
        };
        let c = &pi(&y.filter(|g| g.edge_count() == e)) + &hoch(&z.filter(|g| g.edge_count() == e)).unwrap();
        if pi(&c).is_zero() || (&c - &pi(&c)).is_zero() {
            continue;
        }
        ensure(hoch(&c).unwrap().is_zero(), || format!("random cocycle is not closed:\n{c}"))?;
        let domain = enumerate_basis(n, k - 1, e, Filters::NONE).vectors(Color::Open);
        let op = |x: &GraphVector| hoch(x).unwrap();
        let exact = &c - &pi(&c);
        let (x, _) = solve_operator(&domain, &op, &exact, &[], (n, k - 1, Color::Open))
            .map_err(|err| format!("c − Π(c) not reached ({err}) for\n{c}"))?;
        ensure(hoch(&x).unwrap() == exact, || format!("solution does not map to c − Π(c) for\n{c}"))?;
        let r = solve_operator(&domain, &op, &pi(&c), &[], (n, k - 1, Color::Open));
        ensure(matches!(r, Err(LinalgError::Inconsistent)), || format!("Π(c) ≠ 0 reached for\n{c}"))?;
        solved += 1;
    }
    Ok(format!("Π²=Π, ∂Π=0, Π∂=0 on {} vectors; {solved} cocycles split as image + INCONSISTENT", corpus.len()))
}

fn homotopy() -> Check {
    let mut checked = 0;
    for n in 1..=3 {
        for k in 0..=3 {
            for e in 0..=5 {
                let b = enumerate_basis(n, k, e, Filters { white_univalent: true, ..Filters::NONE });
                for g in symmetric_basis(&b, Symmetry::BlackAltWhite, Color::Open) {
                    ensure(is_invariant_vector(&g), || format!("basis vector not invariant:\n{g}"))?;
                    ensure(homotopy_identity_check(&g).unwrap(), || format!("identity fails on\n{g}"))?;
                    checked += 1;
                }
            }
        }
    }
    let edge = gamma_edge().with_color(Color::Open);
    let lhs = pike_d(&pike_h(&edge).unwrap()).unwrap();
    ensure(lhs == edge, || format!("𝔡𝔡*Γ•–• = {lhs}"))?;
    ensure(homotopy_identity_check(&edge).unwrap(), || "identity fails on Γ•–•".into())?;
    Ok(format!("𝔡𝔡*+𝔡*𝔡 = k+Σr·γ_r on {checked} invariant basis vectors; 𝔡𝔡*Γ•–• = Γ•–•"))
}

fn expansions() -> Check {
    let mut count = 0;
    for (name, check) in [
        ("level-2", oracles::level_two as fn() -> Result<usize, String>),
        ("five-block", oracles::five_block),
        ("top-row", oracles::top_row),
        ("general", oracles::general_level_three),
    ] {
        count += check().map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{count} corollas match term for term"))
}

fn verdict_counts(dir: &Path) -> Result<(usize, usize, usize), String> {
    let text = std::fs::read_to_string(dir.join("verify.txt")).map_err(|e| e.to_string())?;
    let count = |tag: &str| text.lines().filter(|l| l.split(' ').nth(1) == Some(tag)).count();
    Ok((count("PASS"), count("FAIL"), count("UNCHECKED")))
}

fn construction() -> Check {
    let dir = scratch("construction");
    let start = Instant::now();
    let (two, _) = run_cli(2, 3, &dir.join("2-3"))?;
    let t23 = start.elapsed();
    for k in 0..=3 {
        let v = two.get(2, k).ok_or_else(|| format!("(2,{k}) missing"))?;
        ensure(pi(v).is_zero(), || format!("Π ≠ 0 at (2,{k})"))?;
    }
    let (pass23, fail23, _) = verdict_counts(&dir.join("2-3"))?;
    ensure(fail23 == 0 && pass23 > 0, || format!("run 2,3: {fail23} FAIL"))?;
    ensure(t23 < Duration::from_secs(300), || format!("run 2,3 took {t23:?}"))?;
    let o = sfq(&["verify", dir.join("2-3/alpha.txt").to_str().unwrap()]);
    ensure(o.status.success(), || format!("verify exited {:?}", o.status.code()))?;

    let start = Instant::now();
    let (three, _) = run_cli(3, 1, &dir.join("3-1"))?;
    let t31 = start.elapsed();
    let a30 = three.get(3, 0).ok_or("(3,0) missing")?;
    ensure(three.get(3, 1).is_some(), || "(3,1) missing".into())?;
    ensure(a30.max_pikes() == 0, || "(3,0) has pikes".into())?;
    let (pass31, fail31, _) = verdict_counts(&dir.join("3-1"))?;
    ensure(fail31 == 0, || format!("run 3,1: {fail31} FAIL"))?;
    ensure(t31 < Duration::from_secs(1800), || format!("run 3,1 took {t31:?}"))?;
    Ok(format!(
        "run 2,3: {pass23} PASS in {:.1}s; run 3,1: {pass31} PASS, (3,0) pike-free, in {:.1}s",
        t23.as_secs_f64(),
        t31.as_secs_f64()
    ))
}

/// Every `coeff=` token is `p/q` in lowest terms with `q > 0`.
fn rational_text(text: &str) -> Result<usize, String> {
    let mut n = 0;
    for tok in text.split_whitespace().filter_map(|t| t.strip_prefix("coeff=")) {
        let canonical = tok.contains('/') && parse_q(tok).is_some_and(|x| fmt_q(&x) == tok);
        ensure(canonical, || format!("coefficient {tok} is not p/q in lowest terms"))?;
        n += 1;
    }
    Ok(n)
}

fn gauged(table: &AlphaTable, at: &[(u8, u8)]) -> AlphaTable {
    let mut xi = ConvElement::new();
    for &(n, k) in at {
        let c = Corolla::Mixed(n, k);
        let mut v = GraphVector::zero(n, k, Color::Open);
        for (i, b) in connected_basis(n, k, c.value_edges() + 1, false).iter().enumerate() {
            v.add_scaled(b, &q((i as i64 * 7 + 3) % 5 - 2, 1));
        }
        xi.values.insert(c, v);
    }
    gauge_apply(&xi, table).unwrap()
}

fn rows_below(t: &AlphaTable, m: u8) -> Vec<((u8, u8), GraphVector)> {
    t.iter().filter(|((n, _), _)| *n < m).map(|(k, v)| (k, v.clone())).collect()
}

fn theorem_bullets() -> Check {
    let dir = scratch("bullets");
    let mut coefficients = 0;
    let mut boundary = 0;
    let mut tables = Vec::new();
    for (n, k) in [(2, 3), (3, 1)] {
        let (table, text) = run_cli(n, k, &dir.join(format!("{n}-{k}")))?;
        coefficients += rational_text(&text)?;
        for (kk, v) in table.row(1) {
            let want = boundary_value(Corolla::Mixed(1, kk)).unwrap();
            ensure(*v == want, || format!("α(t_{{1,{kk}}}) ≠ broom/k! in run {n},{k}"))?;
            boundary += 1;
        }
        tables.push(table);
    }
    ensure(rows_below(&tables[0], 3) == rows_below(&tables[1], 3), || "runs disagree on rows ≤ 2".into())?;
    // a gauge-moved seed: each level keeps the rows below it fixed
    let mut st = StageState::new(gauged(&tables[1], &[(2, 2), (2, 1), (3, 0)]));
    stage_alpha2(&mut st).map_err(|e| e.to_string())?;
    let before = rows_below(&st.table, 3);
    level(&mut st, 3).map_err(|e| e.to_string())?;
    ensure(rows_below(&st.table, 3) == before, || "level 3 changed a row below 3".into())?;
    Ok(format!("{boundary} boundary entries exact, {coefficients} coefficients p/q in lowest terms, filtration kept"))
}

fn weight_line(file: &Path, seed: u64) -> Result<(f64, f64), String> {
    let o = sfq(&["weight", file.to_str().unwrap(), "--samples", &WEIGHT_SAMPLES.to_string(), "--seed", &seed.to_string()]);
    ensure(o.status.success(), || format!("weight exited {:?}", o.status.code()))?;
    let out = stdout(&o);
    let field = |name: &str| -> Result<f64, String> {
        out.split_whitespace()
            .find_map(|t| t.strip_prefix(name))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| format!("no {name} in {out}"))
    };
    Ok((field("mean=")?, field("stderr=")?))
}

fn weights() -> Check {
    let dir = scratch("weights");
    let mut lines = Vec::new();
    for k in 0..=3u8 {
        let file = dir.join(format!("broom{k}.txt"));
        std::fs::write(&file, format_graph_vector(&broom(k))).unwrap();
        let start = Instant::now();
        let (mean, stderr) = weight_line(&file, 7)?;
        let took = start.elapsed();
        let target = 1.0 / (1..=k as u64).product::<u64>() as f64;
        let err = (mean - target).abs();
        ensure(err <= WEIGHT_SIGMAS * stderr || err == 0.0, || format!("broom {k}: {mean} ± {stderr}"))?;
        ensure(err <= WEIGHT_RELATIVE * target, || format!("broom {k}: relative error {}", err / target))?;
        ensure(took < Duration::from_secs(300), || format!("broom {k} took {took:?}"))?;
        lines.push(format!("k={k}: {mean:.5}±{stderr:.5}"));
    }
    // the complete digraph on three vertices plus an isolated vertex has the
    // right edge count for four black vertices
    let mut complete = Vec::new();
    for a in 1..=3 {
        for b in 1..=3 {
            if a != b {
                complete.push((Vertex::Black(a), Vertex::Black(b)));
            }
        }
    }
    let disconnected = estimate_weight_edges(4, 0, &complete, WEIGHT_SAMPLES, 7).map_err(|e| e.to_string())?;
    ensure(disconnected.mean == 0.0 && disconnected.stderr == 0.0, || "disconnected graph weighs nonzero".into())?;
    let short = broom_graph(2).edges()[..1].to_vec();
    let wrong = estimate_weight_edges(1, 2, &short, WEIGHT_SAMPLES, 7).map_err(|e| e.to_string())?;
    ensure(wrong.mean == 0.0 && wrong.stderr == 0.0, || "wrong edge count weighs nonzero".into())?;
    Ok(format!("{} (tolerance {WEIGHT_SIGMAS}σ, {}%); zero graphs exact", lines.join(", "), WEIGHT_RELATIVE * 100.0))
}

fn determinism() -> Check {
    let dir = scratch("determinism");
    run_cli(2, 3, &dir.join("a"))?;
    run_cli(2, 3, &dir.join("b"))?;
    for f in ["alpha.txt", "report.txt", "verify.txt"] {
        let a = std::fs::read(dir.join("a").join(f)).unwrap();
        let b = std::fs::read(dir.join("b").join(f)).unwrap();
        ensure(a == b, || format!("{f} differs between runs"))?;
    }
    // the verifier catches a perturbed entry and a perturbed broom
    let text = std::fs::read_to_string(dir.join("a/alpha.txt")).unwrap();
    for (header, corolla) in [("o:2,2", "o:2,3"), ("o:1,2", "o:1,2")] {
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        let at = lines.iter().position(|l| l == header).ok_or_else(|| format!("no {header} in table"))? + 1;
        ensure(lines.get(at).is_some_and(|l| l.starts_with("nb=")), || format!("{header} is empty"))?;
        let line = &mut lines[at];
        let old = line.split(' ').last().unwrap().to_string();
        *line = line.replace(&old, "coeff=7/3");
        let file = dir.join(format!("perturbed-{header}.txt").replace(':', "_").replace(',', "-"));
        std::fs::write(&file, lines.join("\n") + "\n").unwrap();
        let o = sfq(&["verify", file.to_str().unwrap()]);
        let out = stdout(&o);
        ensure(o.status.code() == Some(4), || format!("perturbed {header}: exit {:?}", o.status.code()))?;
        let named = out.lines().find_map(|l| l.strip_prefix("FAIL at ")).unwrap_or("");
        ensure(named.split(' ').any(|c| c == corolla), || format!("perturbed {header}: FAIL at {named}"))?;
    }
    Ok("alpha/report/verify byte-identical over two runs; perturbed o:2,2 and o:1,2 rejected by name".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("exact operator laws", operator_laws),
        ("projection and image membership", projection_suite),
        ("pike homotopy identity", homotopy),
        ("expansion oracles", expansions),
        ("rational construction", construction),
        ("boundary, filtration, rationality", theorem_bullets),
        ("broom weights", weights),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
