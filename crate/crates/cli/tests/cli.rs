use std::fs;
use std::path::{Path, PathBuf};

use assert_cmd::Command;
use graphviz_rust::dot_structures::{EdgeTy, Graph, Stmt, Vertex};
use tempfile::TempDir;

const ABABBBAB_SLP: &str = "\
X1 = 'a'
X2 = 'b'
X3 = X1 X2
X4 = X2 X2
X5 = X3 X3
X6 = X4 X3
X7 = X5 X6
";

const ABABBBAB_TSV: &str = "# gqprof v1 q=3 total=6\naba\t1\nabb\t1\nbab\t2\nbba\t1\nbbb\t1\n";

fn gqprof() -> Command {
    Command::cargo_bin("gqprof").unwrap()
}

fn write(dir: &TempDir, name: &str, content: impl AsRef<[u8]>) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, content).unwrap();
    path
}

fn stdout_of(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn compress(dir: &TempDir, name: &str, text: &[u8]) -> PathBuf {
    let input = write(dir, &format!("{name}.txt"), text);
    let slp = dir.path().join(format!("{name}.slp"));
    gqprof()
        .arg("compress")
        .arg(&input)
        .arg("--out")
        .arg(&slp)
        .assert()
        .success();
    slp
}

fn profile_tsv(slp: &Path, q: usize, extra: &[&str]) -> String {
    stdout_of(
        gqprof()
            .arg("profile")
            .arg(slp)
            .args(["--q", &q.to_string()])
            .args(extra),
    )
}

#[test]
fn compress_round_trips_and_reports_sizes() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t.txt", "ababbbab");
    let slp = dir.path().join("t.slp");
    let out = gqprof()
        .arg("compress")
        .arg(&input)
        .arg("--out")
        .arg(&slp)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("N=8"), "{stderr}");
    let grammar = gqprof::parse_slp(&fs::read_to_string(&slp).unwrap()).unwrap();
    assert_eq!(grammar.expand(), b"ababbbab");
    assert!(stderr.contains(&format!("n={}", grammar.num_rules())));
}

#[test]
fn compress_rejects_empty_and_missing_input() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.txt", "");
    gqprof().arg("compress").arg(&empty).assert().code(1);
    gqprof()
        .arg("compress")
        .arg(dir.path().join("missing.txt"))
        .assert()
        .code(1);
}

#[test]
fn profile_golden_tsv() {
    let dir = TempDir::new().unwrap();
    let slp = write(&dir, "g.slp", ABABBBAB_SLP);
    assert_eq!(profile_tsv(&slp, 3, &[]), ABABBBAB_TSV);
    let out = dir.path().join("g.tsv");
    gqprof()
        .arg("profile")
        .arg(&slp)
        .args(["--q", "3", "--out"])
        .arg(&out)
        .assert()
        .success()
        .stdout("");
    assert_eq!(fs::read_to_string(out).unwrap(), ABABBBAB_TSV);
}

#[test]
fn profile_unigrams() {
    let dir = TempDir::new().unwrap();
    let slp = write(&dir, "g.slp", ABABBBAB_SLP);
    assert_eq!(
        profile_tsv(&slp, 1, &[]),
        "# gqprof v1 q=1 total=8\na\t3\nb\t5\n"
    );
}

#[test]
fn basic_and_improved_differ_only_in_stats() {
    let dir = TempDir::new().unwrap();
    let slp = write(&dir, "g.slp", ABABBBAB_SLP);
    let mut stats = Vec::new();
    let mut tsvs = Vec::new();
    for algorithm in ["basic", "improved"] {
        let out = gqprof()
            .arg("profile")
            .arg(&slp)
            .args(["--q", "3", "--stats", "--algorithm", algorithm])
            .output()
            .unwrap();
        assert!(out.status.success());
        tsvs.push(out.stdout);
        let json: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(json["algorithm"], algorithm);
        assert_eq!(json["N"], 8);
        assert_eq!(json["q"], 3);
        assert_eq!(json["distinct_qgrams"], 5);
        assert_eq!(json["total_qgrams"], 6);
        assert_eq!(json["retries"], 0);
        stats.push(json["chars_decompressed"].as_u64().unwrap());
    }
    assert_eq!(tsvs[0], tsvs[1]);
    assert_eq!(stats, vec![14, 8]);
}

#[test]
fn profile_is_deterministic_for_a_seed() {
    let dir = TempDir::new().unwrap();
    let slp = compress(
        &dir,
        "t",
        b"the quick brown fox jumps over the lazy dog the end",
    );
    let a = profile_tsv(&slp, 4, &["--seed", "17"]);
    let b = profile_tsv(&slp, 4, &["--seed", "17"]);
    let c = profile_tsv(&slp, 4, &["--seed", "18"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn verification_failure_exits_2_with_witness() {
    let dir = TempDir::new().unwrap();
    let slp = compress(&dir, "t", b"abcdefg");
    let out = gqprof()
        .arg("profile")
        .arg(&slp)
        .args(["--q", "3", "--max-retries", "0", "--weak-modulus", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("collision"), "{stderr}");
    assert!(stderr.contains("->"), "{stderr}");

    // One retry with honest parameters recovers.
    let tsv = profile_tsv(&slp, 3, &["--max-retries", "1", "--weak-modulus", "5"]);
    assert_eq!(tsv.lines().count(), 6);
}

#[test]
fn input_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.slp", "X1 = 'a'\nX2 = X1 X5\n");
    gqprof()
        .arg("profile")
        .arg(&bad)
        .args(["--q", "3"])
        .assert()
        .code(1);
    let slp = write(&dir, "g.slp", ABABBBAB_SLP);
    gqprof()
        .arg("profile")
        .arg(&slp)
        .args(["--q", "0"])
        .assert()
        .code(1);
    gqprof()
        .arg("profile")
        .arg(&slp)
        .args(["--q", "3", "--algorithm", "fast"])
        .assert()
        .code(1);
    gqprof().arg("profile").arg(&slp).assert().code(1);
    gqprof().arg("frobnicate").assert().code(1);
}

#[test]
fn query_counts() {
    let dir = TempDir::new().unwrap();
    let slp = write(&dir, "g.slp", ABABBBAB_SLP);
    let query = |gram: &str, q: &str| {
        let mut cmd = gqprof();
        cmd.arg("query").arg(&slp).args(["--q", q, gram]);
        cmd
    };
    assert_eq!(stdout_of(&mut query("bab", "3")), "2\n");
    assert_eq!(stdout_of(&mut query("aaa", "3")), "0\n");
    assert_eq!(stdout_of(&mut query("b", "1")), "5\n");
    assert_eq!(stdout_of(&mut query("\\x62ab", "3")), "2\n");
    query("ab", "3").assert().code(1);
    query("abab", "3").assert().code(1);
}

#[test]
fn dist_between_profiles() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.tsv", ABABBBAB_TSV);
    let slp = compress(&dir, "b", b"abababab");
    let b = write(&dir, "b.tsv", profile_tsv(&slp, 3, &[]));
    let dist = |x: &Path, y: &Path| stdout_of(gqprof().arg("dist").arg(x).arg(y));
    assert_eq!(dist(&a, &a), "0\n");
    assert_eq!(dist(&a, &b), "6\n");
    assert_eq!(dist(&b, &a), "6\n");

    let q2 = write(&dir, "c.tsv", "# gqprof v1 q=2 total=1\nab\t1\n");
    gqprof().arg("dist").arg(&a).arg(&q2).assert().code(1);
}

/// (node count, edge list) of a parsed DOT digraph.
fn parse_dot(dot: &str) -> (usize, Vec<(String, String)>) {
    let graph = graphviz_rust::parse(dot).expect("valid DOT");
    let Graph::DiGraph { stmts, .. } = graph else {
        panic!("expected a digraph");
    };
    let mut nodes = 0;
    let mut edges = Vec::new();
    for stmt in stmts {
        match stmt {
            Stmt::Node(_) => nodes += 1,
            Stmt::Edge(e) => match e.ty {
                EdgeTy::Pair(Vertex::N(a), Vertex::N(b)) => {
                    edges.push((format!("{:?}", a.0), format!("{:?}", b.0)))
                }
                other => panic!("unexpected edge {other:?}"),
            },
            _ => {}
        }
    }
    (nodes, edges)
}

#[test]
fn dot_export() {
    let dir = TempDir::new().unwrap();
    let slp = write(&dir, "g.slp", ABABBBAB_SLP);
    let out = dir.path().join("g.dot");
    gqprof()
        .arg("dot")
        .arg(&slp)
        .args(["--q", "3", "--out"])
        .arg(&out)
        .assert()
        .success();
    let dot = fs::read_to_string(&out).unwrap();
    let (nodes, edges) = parse_dot(&dot);
    assert_eq!(nodes, 3);
    assert_eq!(edges.len(), 5);
    assert_eq!(edges.iter().filter(|(a, b)| a == b).count(), 1);
    assert!(dot.contains("label=\"b/2\""));

    let again = stdout_of(gqprof().arg("dot").arg(&slp).args(["--q", "3"]));
    assert_eq!(again, dot);

    let aaaa = compress(&dir, "a", b"aaaa");
    let (nodes, edges) = parse_dot(&stdout_of(
        gqprof().arg("dot").arg(&aaaa).args(["--q", "2"]),
    ));
    assert_eq!(nodes, 1);
    assert_eq!(edges.len(), 1);
    assert_eq!(edges[0].0, edges[0].1);
}

#[test]
fn one_megabyte_pipeline() {
    use rand::{RngExt, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let text: Vec<u8> = (0..1 << 20)
        .map(|_| b"acgt"[rng.random_range(0..4)])
        .collect();
    let dir = TempDir::new().unwrap();
    let slp = compress(&dir, "big", &text);
    let grammar = gqprof::parse_slp(&fs::read_to_string(&slp).unwrap()).unwrap();
    assert_eq!(grammar.text_len(), 1 << 20);
    let tsv = profile_tsv(&slp, 5, &[]);
    let table = gqprof::ProfileTable::from_tsv(&tsv).unwrap();
    assert_eq!(table.total(), (1 << 20) - 4);
    assert_eq!(table.len(), 1024);
}
