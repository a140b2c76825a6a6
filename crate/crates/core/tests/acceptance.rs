//! Acceptance criteria, one printed line each. Runs without the libtest
//! harness so the report reads top to bottom.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use pdfvec::batch::{process_file, run_extract, RunConfig};
use pdfvec::corpus::{generate_corpus, generate_one, CorpusKind};
use pdfvec::extract::{extract_bytes, ExtractOptions};
use pdfvec::graph::{
    average_degree, build_word_graph, clustering_coefficient, degree_centrality_stats, density,
    WordGraph,
};
use pdfvec::meta::shannon_entropy;
use pdfvec::vector::{Group, COLUMN_COUNT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use sha2::{Digest, Sha256};

const SCHEMA_V1_SHA256: &str = "5adc9f1523e2ce4e18b587d56a9b03e7d95bae05b4d7a306f87c347cd2ac6b03";
const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn schema_stability() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_pdfvec"))
        .args(["schema", "--print"])
        .output()
        .map_err(|e| format!("cannot run binary: {e}"))?;
    ensure(out.status.success(), || {
        format!("schema --print exited {}", out.status)
    })?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split('\t').collect())
        .collect();
    ensure(rows.len() == 170, || {
        format!("{} columns printed", rows.len())
    })?;
    let mut names: Vec<&str> = rows.iter().map(|r| r[0]).collect();
    names.sort_unstable();
    names.dedup();
    ensure(names.len() == 170, || "duplicate column names".into())?;

    let mut order: Vec<&str> = Vec::new();
    for r in &rows {
        if order.last() != Some(&r[1]) {
            order.push(r[1]);
        }
    }
    let expected: Vec<&str> = Group::ORDER.iter().map(|g| g.as_str()).collect();
    ensure(order == expected, || format!("group order {order:?}"))?;

    let digest = format!("{:x}", Sha256::digest(text.as_bytes()));
    ensure(digest == SCHEMA_V1_SHA256, || {
        format!("schema hash changed: {digest}")
    })?;
    let shipped = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/v1.tsv"))
        .map_err(|e| e.to_string())?;
    ensure(shipped == text, || {
        "schema/v1.tsv differs from schema --print".into()
    })?;
    Ok(format!(
        "170 unique columns, {} groups in order, sha256 {}",
        order.len(),
        &digest[..12]
    ))
}

/// Brute-force metrics over an adjacency matrix.
struct Matrix {
    adj: Vec<Vec<bool>>,
}

impl Matrix {
    fn n(&self) -> usize {
        self.adj.len()
    }

    fn degree(&self, i: usize) -> usize {
        self.adj[i].iter().filter(|&&b| b).count()
    }

    fn edges(&self) -> usize {
        let mut e = 0;
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                e += self.adj[i][j] as usize;
            }
        }
        e
    }

    fn average_degree(&self) -> f64 {
        if self.n() == 0 {
            return 0.0;
        }
        (0..self.n()).map(|i| self.degree(i) as f64).sum::<f64>() / self.n() as f64
    }

    fn density(&self) -> f64 {
        let n = self.n() as f64;
        if self.n() < 2 {
            return 0.0;
        }
        self.edges() as f64 / (n * (n - 1.0) / 2.0)
    }

    fn clustering(&self) -> f64 {
        if self.n() == 0 {
            return 0.0;
        }
        let mut total = 0.0;
        for i in 0..self.n() {
            let nb: Vec<usize> = (0..self.n()).filter(|&j| self.adj[i][j]).collect();
            let d = nb.len();
            if d < 2 {
                continue;
            }
            let mut links = 0usize;
            for a in 0..d {
                for b in a + 1..d {
                    links += self.adj[nb[a]][nb[b]] as usize;
                }
            }
            total += links as f64 / (d as f64 * (d as f64 - 1.0) / 2.0);
        }
        total / self.n() as f64
    }

    fn centrality(&self) -> (f64, f64) {
        if self.n() < 2 {
            return (0.0, 0.0);
        }
        let c: Vec<f64> = (0..self.n())
            .map(|i| self.degree(i) as f64 / (self.n() - 1) as f64)
            .collect();
        (
            c.iter().sum::<f64>() / c.len() as f64,
            c.iter().cloned().fold(0.0, f64::max),
        )
    }
}

fn compare(label: &str, g: &WordGraph, m: &Matrix) -> Result<(), String> {
    let (mean, max) = degree_centrality_stats(g);
    let (omean, omax) = m.centrality();
    let pairs = [
        ("nodes", g.node_count() as f64, m.n() as f64),
        ("edges", g.edge_count() as f64, m.edges() as f64),
        ("average degree", average_degree(g), m.average_degree()),
        ("density", density(g), m.density()),
        ("clustering", clustering_coefficient(g), m.clustering()),
        ("centrality mean", mean, omean),
        ("centrality max", max, omax),
    ];
    for (what, got, want) in pairs {
        ensure((got - want).abs() <= TOL, || {
            format!("{label}: {what} {got} vs {want}")
        })?;
    }
    Ok(())
}

fn graph_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6_7261_7068);
    for case in 0..1000 {
        if case % 2 == 0 {
            // explicit random edge sets
            let n = rng.gen_range(0..=50);
            let p: f64 = rng.gen();
            let mut g = WordGraph::new();
            let mut adj = vec![vec![false; n]; n];
            let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            for name in &names {
                g.add_node(name);
            }
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(p) {
                        adj[i][j] = true;
                        adj[j][i] = true;
                        g.add_edge(&names[i], &names[j]);
                    }
                }
            }
            compare(&format!("case {case}"), &g, &Matrix { adj })?;
        } else {
            // co-occurrence graphs over random token sequences
            let vocab = rng.gen_range(1..=50);
            let len = rng.gen_range(0..200);
            let window = rng.gen_range(2..=3);
            let seq: Vec<usize> = (0..len).map(|_| rng.gen_range(0..vocab)).collect();
            let tokens: Vec<String> = seq.iter().map(|t| format!("w{t}")).collect();
            let mut index: BTreeMap<usize, usize> = BTreeMap::new();
            for &t in &seq {
                let next = index.len();
                index.entry(t).or_insert(next);
            }
            let n = index.len();
            let mut adj = vec![vec![false; n]; n];
            for i in 0..seq.len() {
                for j in i + 1..(i + window).min(seq.len()) {
                    let (a, b) = (index[&seq[i]], index[&seq[j]]);
                    if a != b {
                        adj[a][b] = true;
                        adj[b][a] = true;
                    }
                }
            }
            compare(
                &format!("case {case}"),
                &build_word_graph(&tokens, window),
                &Matrix { adj },
            )?;
        }
    }
    Ok("1000 random graphs (|V| <= 50) agree within 1e-9".into())
}

fn entropy_oracle() -> Outcome {
    ensure(shannon_entropy("aaaa") == 0.0, || {
        "\"aaaa\" is not 0".into()
    })?;
    ensure(shannon_entropy("abcdabcd") == 2.0, || {
        format!("\"abcdabcd\" gives {}", shannon_entropy("abcdabcd"))
    })?;
    ensure(shannon_entropy("") == 0.0, || {
        "empty string is not 0".into()
    })?;
    let alphabet: Vec<char> = "abcAB01 .-_éßΩ漢字🙂".chars().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x656e_7472);
    for case in 0..1000 {
        let size = rng.gen_range(1..=alphabet.len());
        let len = rng.gen_range(0..300);
        let s: String = (0..len).map(|_| alphabet[rng.gen_range(0..size)]).collect();
        let mut counts: BTreeMap<char, u64> = BTreeMap::new();
        for c in s.chars() {
            *counts.entry(c).or_default() += 1;
        }
        let n = s.chars().count() as f64;
        // H = log2 n - (1/n) * sum c log2 c
        let want = if n == 0.0 {
            0.0
        } else {
            n.log2()
                - counts
                    .values()
                    .map(|&c| c as f64 * (c as f64).log2())
                    .sum::<f64>()
                    / n
        };
        let got = shannon_entropy(&s);
        ensure((got - want).abs() <= TOL, || {
            format!("case {case}: {got} vs {want} for {s:?}")
        })?;
    }
    Ok("1000 random strings agree within 1e-9; \"aaaa\" = 0, \"abcdabcd\" = 2".into())
}

fn fixture_truth_table() -> Outcome {
    let dir = fixtures_dir();
    let expected: Value = serde_json::from_str(
        &fs::read_to_string(dir.join("expected.json")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let table = expected
        .as_object()
        .ok_or("expected.json is not an object")?;
    ensure(table.len() >= 12, || {
        format!("only {} fixtures", table.len())
    })?;
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for (name, entry) in table {
        let result = process_file(&dir.join(name), &ExtractOptions::default());
        let v = &result.vector;
        match entry["status"].as_str() {
            Some("failed") => {
                if result.error.is_none() {
                    failures.push(format!("{name}: expected failure"));
                }
                if v.values.iter().any(|&x| x != 0.0) || v.warnings_count == 0 {
                    failures.push(format!("{name}: failure row not zero with warning"));
                }
            }
            _ => {
                if let Some(e) = &result.error {
                    failures.push(format!("{name}: {e}"));
                    continue;
                }
            }
        }
        for (column, want) in entry["columns"].as_object().into_iter().flatten() {
            let want = want
                .as_f64()
                .ok_or(format!("{name}.{column} not numeric"))?;
            match v.get(column) {
                None => failures.push(format!("{name}: unknown column {column}")),
                Some(got) if (got - want).abs() > TOL => {
                    failures.push(format!("{name}: {column} = {got}, expected {want}"))
                }
                Some(_) => checked += 1,
            }
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!(
        "{} fixtures, {checked} expected values match",
        table.len()
    ))
}

fn robustness() -> Outcome {
    let dir = fixtures_dir();
    let mut seeds: Vec<Vec<u8>> = fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pdf"))
        .filter_map(|p| fs::read(p).ok())
        .filter(|b| !b.is_empty())
        .collect();
    seeds.sort();
    seeds.push(generate_one(CorpusKind::Benign, 11, 0));
    seeds.push(generate_one(CorpusKind::MaliciousLike, 11, 0));

    let previous_hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut rng = ChaCha8Rng::seed_from_u64(0x6675_7a7a);
    let mut crashes = Vec::new();
    let mut parsed = 0usize;
    for case in 0..500 {
        let mut bytes = seeds[case % seeds.len()].clone();
        let flips = rng.gen_range(1..=32);
        for _ in 0..flips {
            let i = rng.gen_range(0..bytes.len());
            bytes[i] = rng.gen();
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(|| {
            extract_bytes(bytes, "fuzz.pdf", &ExtractOptions::default())
        }));
        match outcome {
            Err(_) => crashes.push(format!("case {case}: panic")),
            Ok(Err(_)) => {}
            Ok(Ok(e)) => {
                parsed += 1;
                if e.vector.values.len() != COLUMN_COUNT
                    || e.vector.values.iter().any(|v| !v.is_finite())
                {
                    crashes.push(format!("case {case}: non-finite or short row"));
                }
            }
        }
    }
    panic::set_hook(previous_hook);
    ensure(crashes.is_empty(), || crashes.join("; "))?;
    Ok(format!(
        "500 mutations, 0 crashes, {parsed} parsed, all rows finite"
    ))
}

fn corpus(dir: &Path, per_kind: usize, seed: u64) -> Result<(), String> {
    generate_corpus(CorpusKind::Benign, per_kind, seed, dir).map_err(|e| e.to_string())?;
    generate_corpus(CorpusKind::MaliciousLike, per_kind, seed, dir).map_err(|e| e.to_string())?;
    Ok(())
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = tmp.path().join("in");
    corpus(&input, 30, 5)?;
    for entry in fs::read_dir(fixtures_dir()).map_err(|e| e.to_string())? {
        let p = entry.map_err(|e| e.to_string())?.path();
        if p.extension().is_some_and(|x| x == "pdf") {
            fs::copy(&p, input.join(p.file_name().unwrap())).map_err(|e| e.to_string())?;
        }
    }
    let mut outputs = Vec::new();
    for workers in [1, 8] {
        let out = tmp.path().join(format!("w{workers}.csv"));
        let config = RunConfig {
            worker_count: workers,
            ..RunConfig::new(vec![input.clone()], out.clone())
        };
        run_extract(&config).map_err(|e| e.to_string())?;
        outputs.push(fs::read(out).map_err(|e| e.to_string())?);
    }
    ensure(outputs[0] == outputs[1], || {
        "CSV differs between 1 and 8 workers".into()
    })?;
    let rows = outputs[0].iter().filter(|&&b| b == b'\n').count() - 1;
    Ok(format!(
        "{rows} rows, byte-identical CSV for 1 and 8 workers"
    ))
}

fn throughput() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = tmp.path().join("in");
    corpus(&input, 100, 9)?;
    let config = RunConfig::new(vec![input], tmp.path().join("out.csv"));
    let start = Instant::now();
    let report = run_extract(&config).map_err(|e| e.to_string())?;
    let wall = start.elapsed().as_secs_f64();
    ensure(
        report.files_seen == 200 && report.files_extracted == 200,
        || {
            format!(
                "{} seen, {} extracted",
                report.files_seen, report.files_extracted
            )
        },
    )?;
    let mean = wall / 200.0;
    ensure(mean <= 1.0, || format!("{mean:.4} s/doc"))?;
    Ok(format!(
        "200 generated files on one worker, {mean:.5} s/doc (limit 1.0)"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("schema stability", schema_stability),
        ("graph metric oracle", graph_oracle),
        ("entropy oracle", entropy_oracle),
        ("fixture truth table", fixture_truth_table),
        ("robustness under mutation", robustness),
        ("determinism under parallelism", determinism),
        ("throughput", throughput),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
