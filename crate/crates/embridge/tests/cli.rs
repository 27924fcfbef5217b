#![allow(clippy::needless_range_loop)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use embridge::formats::{load_embeddings, load_projection};
use tempfile::TempDir;

const WORDS: [&[&str]; 3] = [
    &["graph", "walk", "node", "edge", "vertex", "path"],
    &["word", "text", "corpus", "token", "sentence", "phrase"],
    &["matrix", "vector", "rotation", "basis", "norm", "angle"],
];

/// Three 8-document clusters, ring-linked inside each cluster with a few
/// cross links, and cluster-specific vocabulary.
fn fixture() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let mut edges = String::new();
    let mut content = String::new();
    for c in 0..3 {
        for i in 0..8 {
            let id = c * 8 + i;
            edges.push_str(&format!("d{id}\td{}\n", c * 8 + (i + 1) % 8));
            edges.push_str(&format!("d{id}\td{}\n", c * 8 + (i + 3) % 8));
            let words: Vec<&str> = (0..24).map(|k| WORDS[c][(k * (i + 1)) % 6]).collect();
            content.push_str(&format!("d{id}\t{} shared common\n", words.join(" ")));
        }
        edges.push_str(&format!("d{}\td{}\n", c * 8, ((c + 1) % 3) * 8 + 4));
    }
    fs::write(dir.path().join("edges.tsv"), edges).unwrap();
    fs::write(dir.path().join("content.tsv"), content).unwrap();
    dir
}

fn embridge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_embridge")).args(args).env_remove("EMBRIDGE_SEED").output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = embridge(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn small_train(out: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = out.iter().map(|s| s.to_string()).collect();
    v.extend(["--dim", "8", "--epochs", "2", "--window", "3"].map(String::from));
    v
}

fn run_owned(args: &[String]) -> Output {
    ok(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn walks_line_count_and_length() {
    let dir = fixture();
    let d = dir.path();
    ok(&["walks", "--edges", &p(d, "edges.tsv"), "--out", &p(d, "w.txt"), "--freq", &p(d, "f.tsv"), "--walks-per-node", "3"]);
    let walks = fs::read_to_string(d.join("w.txt")).unwrap();
    assert_eq!(walks.lines().count(), 3 * 24);
    assert!(walks.lines().all(|l| l.split(' ').count() == 80));
    assert!(d.join("w.txt.run.json").exists());

    ok(&["walks", "--edges", &p(d, "edges.tsv"), "--out", &p(d, "w1.txt"), "--freq", &p(d, "f1.tsv"), "--walk-length", "1"]);
    let walks = fs::read_to_string(d.join("w1.txt")).unwrap();
    assert_eq!(walks.lines().count(), 80 * 24);
    assert!(walks.lines().all(|l| !l.contains(' ')));
}

#[test]
fn missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = embridge(&["walks", "--edges", &p(d, "absent.tsv"), "--out", &p(d, "w"), "--freq", &p(d, "f")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.tsv"));
}

#[test]
fn malformed_input_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.tsv"), "a\tb\nc d\n").unwrap();
    let out = embridge(&["stats", "--edges", &p(d, "bad.tsv")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn stats_counts() {
    let dir = fixture();
    let out = ok(&["stats", "--edges", &p(dir.path(), "edges.tsv"), "--content", &p(dir.path(), "content.tsv")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("documents\t24\n"), "{text}");
    assert!(text.contains("with_content\t24\n"), "{text}");
    assert!(text.contains("isolated\t0\n"), "{text}");
}

#[test]
fn train_header_and_variants() {
    let dir = fixture();
    let d = dir.path();
    let mut args = vec!["train-nodes".to_string(), "--edges".into(), p(d, "edges.tsv"), "--out".into(), p(d, "n.emb")];
    args.extend(["--walks-per-node", "2", "--walk-length", "10", "--dim", "12", "--epochs", "1"].map(String::from));
    run_owned(&args);
    let text = fs::read_to_string(d.join("n.emb")).unwrap();
    assert_eq!(text.lines().next(), Some("24 12"));

    run_owned(&small_train(&["train-docs", "--content", &p(d, "content.tsv"), "--out", &p(d, "c.emb"), "--variant", "dv-dbow"]));
    assert_eq!(load_embeddings(&d.join("c.emb")).unwrap().len(), 24);

    let out = embridge(&["train-docs", "--content", &p(d, "content.tsv"), "--out", &p(d, "x.emb"), "--variant", "lsa"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--variant"));
}

#[test]
fn self_alignment_is_identity() {
    let dir = fixture();
    let d = dir.path();
    run_owned(&small_train(&["train-docs", "--content", &p(d, "content.tsv"), "--out", &p(d, "c.emb")]));
    let out = ok(&["align", "--nodes", &p(d, "c.emb"), "--content", &p(d, "c.emb"), "--out", &p(d, "w.proj")]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let residual: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("orthogonality residual: "))
        .expect("residual line")
        .parse()
        .unwrap();
    assert!(residual <= 1e-8);
    let w = load_projection(&d.join("w.proj")).unwrap();
    let eye = embridge::core::DenseMatrix::identity(8);
    assert!(w.matrix().max_abs_diff(&eye) <= 1e-8);
}

#[test]
fn mismatched_dims_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("a.emb"), "2 2\nx 1 0\ny 0 1\n").unwrap();
    fs::write(d.join("b.emb"), "2 3\nx 1 0 0\ny 0 1 0\n").unwrap();
    let out = embridge(&["align", "--nodes", &p(d, "a.emb"), "--content", &p(d, "b.emb"), "--out", &p(d, "w")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn translate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (c, s) = (0.7f64.cos(), 0.7f64.sin());
    fs::write(d.join("w.proj"), format!("2\n{c} {} \n{s} {c}\n", -s)).unwrap();
    fs::write(d.join("b.emb"), "2 2\nx 0.25 -1.5\ny 3 0.125\n").unwrap();
    ok(&["translate", "--projection", &p(d, "w.proj"), "--embeddings", &p(d, "b.emb"), "--direction", "content-to-node", "--out", &p(d, "a.emb")]);
    let a = load_embeddings(&d.join("a.emb")).unwrap();
    // b W with W = [[c, -s], [s, c]]
    let x = a.get("x").unwrap();
    assert!((x[0] - (0.25 * c - 1.5 * s)).abs() <= 1e-12);
    assert!((x[1] - (-0.25 * s - 1.5 * c)).abs() <= 1e-12);
    ok(&["translate", "--projection", &p(d, "w.proj"), "--embeddings", &p(d, "a.emb"), "--direction", "node-to-content", "--out", &p(d, "b2.emb")]);
    let b = load_embeddings(&d.join("b.emb")).unwrap();
    let b2 = load_embeddings(&d.join("b2.emb")).unwrap();
    for ((_, u), (_, v)) in b.iter().zip(b2.iter()) {
        assert!(u.iter().zip(v).all(|(x, y)| (x - y).abs() <= 1e-8));
    }
}

fn eval_links(d: &Path, report: &str, workers: &str) -> Vec<String> {
    let mut args: Vec<String> = [
        "eval-links", "--edges", &p(d, "edges.tsv"), "--content", &p(d, "content.tsv"), "--sample", "5",
        "--seed", "7", "--report", &p(d, report), "--flat", &p(d, &format!("{report}.flat")), "--workers", workers,
        "--walks-per-node", "3", "--walk-length", "10", "--content-epochs", "3", "--n-values", "1,5",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    args.extend(["--dim", "8", "--epochs", "1", "--window", "3"].map(String::from));
    args
}

#[test]
fn eval_links_repeats_byte_for_byte() {
    let dir = fixture();
    let d = dir.path();
    run_owned(&eval_links(d, "r1", "1"));
    run_owned(&eval_links(d, "r2", "1"));
    let r1 = fs::read(d.join("r1")).unwrap();
    assert_eq!(r1, fs::read(d.join("r2")).unwrap());
    assert_eq!(fs::read(d.join("r1.flat")).unwrap(), fs::read(d.join("r2.flat")).unwrap());
    let text = String::from_utf8(r1).unwrap();
    assert!(text.starts_with("# embridge"));
    assert!(text.contains("# seed = 7\n"), "{text}");
    assert!(text.contains("documents evaluated: 5"), "{text}");
}

#[test]
fn eval_content_repeats_byte_for_byte() {
    let dir = fixture();
    let d = dir.path();
    let args = |report: &str| -> Vec<String> {
        let mut v: Vec<String> = [
            "eval-content", "--edges", &p(d, "edges.tsv"), "--content", &p(d, "content.tsv"), "--sample", "4",
            "--seed", "3", "--report", &p(d, report), "--walks-per-node", "3", "--walk-length", "10",
            "--content-epochs", "3",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        v.extend(["--dim", "8", "--epochs", "1", "--window", "3"].map(String::from));
        v
    };
    run_owned(&args("c1"));
    run_owned(&args("c2"));
    let c1 = fs::read_to_string(d.join("c1")).unwrap();
    assert_eq!(c1, fs::read_to_string(d.join("c2")).unwrap());
    assert!(c1.contains("# threshold = 0.2\n"), "{c1}");
}

#[test]
fn eval_protocol_independent_of_workers_given_inputs() {
    let dir = fixture();
    let d = dir.path();
    run_owned(&small_train(&["train-docs", "--content", &p(d, "content.tsv"), "--out", &p(d, "c.emb")]));
    let with = |report: &str, workers: &str| {
        let mut a = eval_links(d, report, workers);
        a.extend(["--content-emb".to_string(), p(d, "c.emb")]);
        a
    };
    run_owned(&with("s", "1"));
    run_owned(&with("m", "3"));
    let strip = |name: &str| -> String {
        fs::read_to_string(d.join(name)).unwrap().lines().filter(|l| !l.starts_with("# workers")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(strip("s"), strip("m"));
    assert_eq!(strip("s.flat"), strip("m.flat"));
}

#[test]
fn sidecar_records_configuration() {
    let dir = fixture();
    let d = dir.path();
    run_owned(&small_train(&["train-docs", "--content", &p(d, "content.tsv"), "--out", &p(d, "c.emb"), "--seed", "11"]));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(PathBuf::from(p(d, "c.emb.run.json"))).unwrap()).unwrap();
    assert_eq!(json["command"], "train-docs");
    assert_eq!(json["config"]["seed"], "11");
    assert_eq!(json["config"]["dim"], "8");
    assert_eq!(json["config"]["variant"], "dv-dm");
}
