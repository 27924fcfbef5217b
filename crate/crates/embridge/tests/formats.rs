use embridge::core::{DenseMatrix, DocumentNetwork, EmbeddingMatrix, FrequencyTable, ProjectionMatrix, WalkCorpus};
use embridge::formats::*;
use embridge::Error;
use proptest::prelude::*;

fn edges(text: &str) -> DocumentNetwork {
    read_edge_list(text.as_bytes()).unwrap().0
}

fn parse_line(err: Error) -> usize {
    match err {
        Error::Parse { line, .. } | Error::Row { line, .. } => line,
        other => panic!("expected a line-numbered error, got {other:?}"),
    }
}

#[test]
fn edge_list_examples() {
    let (net, report) = read_edge_list("a\tb\nb\tc\n".as_bytes()).unwrap();
    assert_eq!(net.ids(), ["a", "b", "c"]);
    assert_eq!(net.edge_count(), 2);
    assert_eq!(report.self_loops, 0);

    let (net, report) = read_edge_list("a\tb\na\tb\na\ta\n".as_bytes()).unwrap();
    assert_eq!(net.len(), 2);
    assert_eq!(net.edge_count(), 1);
    assert_eq!(report.self_loops, 1);
    assert_eq!(report.duplicates, 1);
}

#[test]
fn edge_list_skips_comments_and_blanks() {
    let net = edges("# header\n\na\tb\n   \n# trailing\nb\tc\n");
    assert_eq!(net.edge_count(), 2);
}

#[test]
fn edge_list_parse_errors_carry_line_numbers() {
    let err = read_edge_list("a\tb\n# c\na b\n".as_bytes()).unwrap_err();
    assert_eq!(parse_line(err), 3);
    let err = read_edge_list("a\tb\tc\n".as_bytes()).unwrap_err();
    assert_eq!(parse_line(err), 1);
    assert!(read_edge_list("a\t\n".as_bytes()).is_err());
}

#[test]
fn isolated_nodes_survive_serialization() {
    let mut net = edges("a\tb\n");
    net.add_node("lonely");
    net.add_edge("c", "a");
    let mut out = Vec::new();
    write_edge_list(&net, &mut out).unwrap();
    assert_eq!(String::from_utf8(out.clone()).unwrap(), "a\tb\nlonely\tlonely\nc\ta\n");
    assert_eq!(edges(std::str::from_utf8(&out).unwrap()), net);
}

fn edge_lines() -> impl Strategy<Value = Vec<(u8, u8)>> {
    prop::collection::vec((0u8..12, 0u8..12), 0..40)
}

proptest! {
    #[test]
    fn edge_list_idempotent(pairs in edge_lines()) {
        let text: String = pairs.iter().map(|(s, t)| format!("n{s}\tn{t}\n")).collect();
        let net = edges(&text);
        let mut once = Vec::new();
        write_edge_list(&net, &mut once).unwrap();
        let again = edges(std::str::from_utf8(&once).unwrap());
        prop_assert_eq!(&again, &net);
        let mut twice = Vec::new();
        write_edge_list(&again, &mut twice).unwrap();
        prop_assert_eq!(once, twice);
    }
}

#[test]
fn content_examples() {
    let docs = read_content("d1\tDeep Learning\nd2\t\n".as_bytes()).unwrap();
    assert_eq!(docs[0], ("d1".to_string(), vec!["deep".to_string(), "learning".to_string()]));
    assert_eq!(docs[1], ("d2".to_string(), vec![]));
}

#[test]
fn duplicate_content_id_is_named() {
    let err = read_content("d1\tx\nd1\ty\n".as_bytes()).unwrap_err();
    let message = err.to_string();
    assert!(message.contains("d1"), "{message}");
    assert_eq!(parse_line(err), 2);
}

#[test]
fn content_needs_a_tab() {
    assert_eq!(parse_line(read_content("d1 text\n".as_bytes()).unwrap_err()), 1);
}

fn sample_embeddings() -> EmbeddingMatrix {
    let mut e = EmbeddingMatrix::new(3);
    e.push("a", &[0.1, -2.5e-7, 3.0]).unwrap();
    e.push("b", &[1.0 / 3.0, 1e20, -0.0]).unwrap();
    e
}

#[test]
fn embeddings_round_trip() {
    let e = sample_embeddings();
    let mut out = Vec::new();
    write_embeddings(&e, &mut out).unwrap();
    assert!(out.starts_with(b"2 3\n"));
    assert_eq!(read_embeddings(out.as_slice()).unwrap(), e);
}

#[test]
fn embedding_row_width_is_checked() {
    let err = read_embeddings("2 3\na 1 2 3\nb 1 2 3 4\n".as_bytes()).unwrap_err();
    assert!(matches!(
        err,
        Error::Row { line: 3, source: embridge::core::Error::DimensionMismatch { expected: 3, found: 4 } }
    ));
}

#[test]
fn embedding_row_count_is_checked() {
    assert!(read_embeddings("3 2\na 1 2\nb 1 2\n".as_bytes()).is_err());
}

#[test]
fn embedding_duplicate_id_is_an_error() {
    assert!(read_embeddings("2 1\na 1\na 2\n".as_bytes()).is_err());
}

#[test]
fn empty_embeddings() {
    let e = EmbeddingMatrix::new(7);
    let mut out = Vec::new();
    write_embeddings(&e, &mut out).unwrap();
    assert_eq!(out, b"0 7\n");
    let back = read_embeddings(out.as_slice()).unwrap();
    assert!(back.is_empty());
    assert_eq!(back.dim(), 7);
}

#[test]
fn non_finite_values_are_rejected() {
    assert!(read_embeddings("1 2\na 1 NaN\n".as_bytes()).is_err());
    assert!(read_embeddings("1 2\na 1 inf\n".as_bytes()).is_err());
}

#[test]
fn projection_round_trip() {
    let c = (0.3f64).cos();
    let s = (0.3f64).sin();
    let w = ProjectionMatrix::from_matrix(DenseMatrix::new(2, 2, vec![c, -s, s, c]).unwrap()).unwrap();
    let mut out = Vec::new();
    write_projection(&w, &mut out).unwrap();
    assert!(out.starts_with(b"2\n"));
    assert_eq!(read_projection(out.as_slice()).unwrap(), w);
}

#[test]
fn projection_shape_is_checked() {
    assert!(read_projection("2\n1 0\n".as_bytes()).is_err());
    assert!(read_projection("2\n1 0 0\n0 1\n".as_bytes()).is_err());
}

#[test]
fn walks_and_frequencies_round_trip() {
    let ids = vec!["x".to_string(), "y".to_string(), "z".to_string()];
    let corpus = WalkCorpus::from_walks(ids, vec![vec![0, 1, 0], vec![1, 0], vec![2]]).unwrap();
    let mut out = Vec::new();
    write_walks(&corpus, &mut out).unwrap();
    assert_eq!(out, b"x y x\ny x\nz\n");
    assert_eq!(read_walks(out.as_slice()).unwrap(), corpus);

    let table: FrequencyTable = corpus.frequency_table();
    let mut out = Vec::new();
    write_frequencies(&table, &mut out).unwrap();
    assert_eq!(read_frequencies(out.as_slice()).unwrap(), table);
}

proptest! {
    #[test]
    fn floats_round_trip_exactly(values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 1..8)) {
        let mut e = EmbeddingMatrix::new(values.len());
        e.push("v", &values).unwrap();
        let mut out = Vec::new();
        write_embeddings(&e, &mut out).unwrap();
        let back = read_embeddings(out.as_slice()).unwrap();
        for (a, b) in back.row(0).iter().zip(&values) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
