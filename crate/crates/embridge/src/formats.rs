//! Line-oriented text formats for networks, content, walks, frequencies,
//! embeddings and projections.
//!
//! Floats are written in the shortest form that parses back to the same
//! value, so every save/load pair is an exact round trip.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use embridge_core::corpus::IngestReport;
use embridge_core::{tokenize, DenseMatrix, DocumentNetwork, EmbeddingMatrix, FrequencyTable, ProjectionMatrix, WalkCorpus};

use crate::error::{Error, Result};

/// Appends `x` in shortest round-trip form, switching to exponent notation
/// for very small or large magnitudes.
pub fn push_float(out: &mut String, x: f64) {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) {
        write!(out, "{x}").unwrap();
    } else {
        write!(out, "{x:e}").unwrap();
    }
}

fn parse_float(token: &str, line: usize) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::parse(line, format!("not a finite number: {token:?}"))),
    }
}

fn parse_count(token: &str, line: usize, what: &str) -> Result<usize> {
    token.parse().map_err(|_| Error::parse(line, format!("{what} is not a count: {token:?}")))
}

/// Yields `(line_number, line)` for lines that are neither blank nor `#` comments.
fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(Error::Io { path: "<input>".into(), source: e })),
        Ok(l) => {
            let t = l.trim_end_matches('\r');
            if t.trim().is_empty() || t.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, t.to_string())))
            }
        }
    })
}

// ---------------------------------------------------------------------------
// Edge lists and content

/// Reads `source<TAB>target` lines. Self-loops and repeated edges are dropped
/// and counted in the report.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<(DocumentNetwork, IngestReport)> {
    let mut pairs = Vec::new();
    for item in data_lines(reader) {
        let (n, line) = item?;
        let fields: Vec<&str> = line.split('\t').collect();
        match fields.as_slice() {
            [s, t] if !s.trim().is_empty() && !t.trim().is_empty() => {
                pairs.push((s.trim().to_string(), t.trim().to_string()))
            }
            _ => return Err(Error::parse(n, format!("expected `source<TAB>target`, found {} field(s)", fields.len()))),
        }
    }
    let (net, report) = DocumentNetwork::from_edges(pairs);
    if report.self_loops > 0 {
        log::warn!("dropped {} self-loop(s)", report.self_loops);
    }
    Ok((net, report))
}

/// Writes edges in insertion order. A document that would otherwise first
/// appear later than its index, or not at all, is introduced by a self-loop
/// line, so reading the output back yields the same network.
pub fn write_edge_list<W: Write>(net: &DocumentNetwork, mut out: W) -> io::Result<()> {
    let ids = net.ids();
    // Every index below `next` has already appeared in the output.
    let mut next = 0;
    let introduce = |from: usize, upto: usize, out: &mut W| -> io::Result<()> {
        (from..upto).try_for_each(|i| writeln!(out, "{}\t{}", ids[i], ids[i]))
    };
    for &(s, t) in net.edges() {
        let hi = s.max(t);
        // The line itself introduces its unseen ends in order when they are
        // consecutive indices; otherwise all but the larger get a self-loop.
        let first = if s < t && s >= next && t == s + 1 { s } else { hi };
        introduce(next, first.max(next), &mut out)?;
        writeln!(out, "{}\t{}", ids[s], ids[t])?;
        next = next.max(hi + 1);
    }
    introduce(next, ids.len(), &mut out)?;
    out.flush()
}

/// Reads `id<TAB>text` lines into tokenized documents, in file order. An
/// empty text yields an empty token list.
pub fn read_content<R: BufRead>(reader: R) -> Result<Vec<(String, Vec<String>)>> {
    let mut seen = BTreeSet::new();
    let mut docs = Vec::new();
    for item in data_lines(reader) {
        let (n, line) = item?;
        let (id, text) = line.split_once('\t').ok_or_else(|| Error::parse(n, "expected `id<TAB>text`"))?;
        let id = id.trim();
        if id.is_empty() {
            return Err(Error::parse(n, "empty document id"));
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::parse(n, format!("duplicate document id {id:?}")));
        }
        docs.push((id.to_string(), tokenize(text)));
    }
    Ok(docs)
}

// ---------------------------------------------------------------------------
// Walks and frequencies

/// One walk per line, ids separated by single spaces.
pub fn write_walks<W: Write>(corpus: &WalkCorpus, mut out: W) -> io::Result<()> {
    let mut line = String::new();
    for walk in &corpus.walks {
        line.clear();
        for (i, &v) in walk.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&corpus.node_ids[v]);
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

/// Reads a walk dump. Nodes are indexed by first appearance as a walk root,
/// then by first appearance elsewhere, which reproduces the indexing of a
/// corpus generated in canonical order.
pub fn read_walks<R: BufRead>(reader: R) -> Result<WalkCorpus> {
    let mut lines = Vec::new();
    for item in data_lines(reader) {
        let (_, line) = item?;
        lines.push(line);
    }
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut ids = Vec::new();
    let mut intern = |id: &str| -> usize {
        if let Some(&i) = index.get(id) {
            return i;
        }
        ids.push(id.to_string());
        index.insert(id.to_string(), ids.len() - 1);
        ids.len() - 1
    };
    for line in &lines {
        if let Some(root) = line.split_whitespace().next() {
            intern(root);
        }
    }
    let walks: Vec<Vec<usize>> = lines.iter().map(|l| l.split_whitespace().map(&mut intern).collect()).collect();
    Ok(WalkCorpus::from_walks(ids, walks)?)
}

/// `id<TAB>count` per node, in table order.
pub fn write_frequencies<W: Write>(table: &FrequencyTable, mut out: W) -> io::Result<()> {
    for (id, count) in &table.entries {
        writeln!(out, "{id}\t{count}")?;
    }
    out.flush()
}

pub fn read_frequencies<R: BufRead>(reader: R) -> Result<FrequencyTable> {
    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();
    for item in data_lines(reader) {
        let (n, line) = item?;
        let (id, count) = line.split_once('\t').ok_or_else(|| Error::parse(n, "expected `id<TAB>count`"))?;
        let count: u64 = count.trim().parse().map_err(|_| Error::parse(n, format!("bad count {count:?}")))?;
        if !seen.insert(id.to_string()) {
            return Err(Error::parse(n, format!("duplicate id {id:?}")));
        }
        entries.push((id.to_string(), count));
    }
    Ok(FrequencyTable { entries })
}

// ---------------------------------------------------------------------------
// Embeddings and projections

/// Header `N k`, then `id v1 ... vk` per row.
pub fn write_embeddings<W: Write>(emb: &EmbeddingMatrix, mut out: W) -> io::Result<()> {
    writeln!(out, "{} {}", emb.len(), emb.dim())?;
    let mut line = String::new();
    for (id, row) in emb.iter() {
        line.clear();
        line.push_str(id);
        for &x in row {
            line.push(' ');
            push_float(&mut line, x);
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

pub fn read_embeddings<R: BufRead>(reader: R) -> Result<EmbeddingMatrix> {
    let mut lines = data_lines(reader);
    let (hn, header) = lines.next().transpose()?.ok_or_else(|| Error::parse(1, "missing `N k` header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [rows, dim] = fields.as_slice() else {
        return Err(Error::parse(hn, "expected header `N k`"));
    };
    let rows = parse_count(rows, hn, "N")?;
    let dim = parse_count(dim, hn, "k")?;
    let mut emb = EmbeddingMatrix::new(dim);
    let mut buf = Vec::with_capacity(dim);
    let mut last = hn;
    for item in lines {
        let (n, line) = item?;
        last = n;
        let mut tokens = line.split_whitespace();
        let id = tokens.next().expect("data lines are non-blank");
        buf.clear();
        for t in tokens {
            buf.push(parse_float(t, n)?);
        }
        emb.push(id, &buf).map_err(|source| Error::Row { line: n, source })?;
    }
    if emb.len() != rows {
        return Err(Error::Row {
            line: last,
            source: embridge_core::Error::ShapeMismatch {
                expected: format!("{rows} rows"),
                found: format!("{} rows", emb.len()),
            },
        });
    }
    Ok(emb)
}

/// Header `k`, then `k` rows of `k` values.
pub fn write_projection<W: Write>(w: &ProjectionMatrix, mut out: W) -> io::Result<()> {
    let m = w.matrix();
    writeln!(out, "{}", m.rows())?;
    let mut line = String::new();
    for row in m.iter_rows() {
        line.clear();
        for (i, &x) in row.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            push_float(&mut line, x);
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

pub fn read_projection<R: BufRead>(reader: R) -> Result<ProjectionMatrix> {
    let mut lines = data_lines(reader);
    let (hn, header) = lines.next().transpose()?.ok_or_else(|| Error::parse(1, "missing `k` header"))?;
    let k = parse_count(header.trim(), hn, "k")?;
    let mut data = Vec::with_capacity(k * k);
    let mut rows = 0;
    for item in lines {
        let (n, line) = item?;
        let row: Vec<f64> = line.split_whitespace().map(|t| parse_float(t, n)).collect::<Result<_>>()?;
        if row.len() != k {
            return Err(Error::Row { line: n, source: embridge_core::Error::DimensionMismatch { expected: k, found: row.len() } });
        }
        data.extend(row);
        rows += 1;
    }
    if rows != k {
        return Err(Error::Core(embridge_core::Error::ShapeMismatch {
            expected: format!("{k} rows"),
            found: format!("{rows} rows"),
        }));
    }
    Ok(ProjectionMatrix::from_matrix(DenseMatrix::new(k, k, data)?)?)
}

// ---------------------------------------------------------------------------
// Path helpers

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn read_path<T>(path: &Path, f: impl FnOnce(BufReader<File>) -> Result<T>) -> Result<T> {
    f(open(path)?).map_err(|e| e.in_file(path))
}

/// Writes through a buffered file handle.
pub fn write_path(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    f(&mut out).map_err(|e| Error::io(path, e))
}

pub fn load_edge_list(path: &Path) -> Result<(DocumentNetwork, IngestReport)> {
    read_path(path, read_edge_list)
}

pub fn load_content(path: &Path) -> Result<Vec<(String, Vec<String>)>> {
    read_path(path, read_content)
}

pub fn load_walks(path: &Path) -> Result<WalkCorpus> {
    read_path(path, read_walks)
}

pub fn load_frequencies(path: &Path) -> Result<FrequencyTable> {
    read_path(path, read_frequencies)
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    read_path(path, read_embeddings)
}

pub fn load_projection(path: &Path) -> Result<ProjectionMatrix> {
    read_path(path, read_projection)
}

/// Loads an edge list and, optionally, a content file. Content for ids absent
/// from the edge list adds them as unlinked documents.
pub fn load_network(edges: &Path, content: Option<&Path>) -> Result<(DocumentNetwork, IngestReport)> {
    let (mut net, report) = load_edge_list(edges)?;
    if let Some(path) = content {
        net.attach_content(load_content(path)?);
    }
    Ok((net, report))
}
