//! Document networks: citation edges between documents plus their tokenized text.
//!
//! A [`DocumentNetwork`] is immutable once built. The leave-one-out surgery
//! operations ([`DocumentNetwork::hide_links`], [`DocumentNetwork::hide_content`])
//! return modified copies.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Lowercase and split on Unicode whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(|t| t.to_lowercase()).collect()
}

/// Counts of what was discarded while ingesting edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NetworkStats {
    pub n_documents: usize,
    pub n_links: usize,
    pub n_with_content: usize,
    /// Documents with neither incoming nor outgoing links.
    pub n_isolated: usize,
}

/// Directed citation graph over opaque document ids, with optional content.
///
/// Ids map to dense indices `0..len()` in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DocumentNetwork {
    ids: Vec<String>,
    index: BTreeMap<String, usize>,
    // Insertion order is kept so re-serializing reproduces the index assignment.
    edges: Vec<(usize, usize)>,
    edge_set: BTreeSet<(usize, usize)>,
    content: Vec<Option<Vec<String>>>,
}

impl DocumentNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a network from `(source, target)` pairs, dropping self-loops and
    /// duplicate edges.
    pub fn from_edges<I, S>(edges: I) -> (Self, IngestReport)
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut net = Self::new();
        let mut report = IngestReport::default();
        for (source, target) in edges {
            let (source, target) = (source.as_ref(), target.as_ref());
            if source == target {
                // Still a document, even if its only link is to itself.
                net.add_node(source);
                report.self_loops += 1;
                continue;
            }
            if !net.add_edge(source, target) {
                report.duplicates += 1;
            }
        }
        (net, report)
    }

    /// Inserts a node if absent and returns its index.
    pub fn add_node(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len();
        self.ids.push(id.to_string());
        self.index.insert(id.to_string(), i);
        self.content.push(None);
        i
    }

    /// Adds a directed edge. Returns `false` if it was a duplicate or a self-loop.
    pub fn add_edge(&mut self, source: &str, target: &str) -> bool {
        let s = self.add_node(source);
        let t = self.add_node(target);
        if s == t || !self.edge_set.insert((s, t)) {
            return false;
        }
        self.edges.push((s, t));
        true
    }

    /// Attaches token sequences to documents. Ids not yet in the network are
    /// added as isolated nodes; empty sequences leave the document content-less.
    pub fn attach_content<I, S>(&mut self, content: I)
    where
        I: IntoIterator<Item = (S, Vec<String>)>,
        S: AsRef<str>,
    {
        for (id, tokens) in content {
            let i = self.add_node(id.as_ref());
            self.content[i] = if tokens.is_empty() { None } else { Some(tokens) };
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id_of(&self, index: usize) -> Option<&str> {
        self.ids.get(index).map(String::as_str)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    /// Edges in ingestion order, as index pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, source: usize, target: usize) -> bool {
        self.edge_set.contains(&(source, target))
    }

    pub fn content(&self, index: usize) -> Option<&[String]> {
        self.content.get(index).and_then(|c| c.as_deref())
    }

    pub fn has_content(&self, index: usize) -> bool {
        self.content(index).is_some()
    }

    /// `(id, tokens)` for every content-bearing document, in index order.
    pub fn documents(&self) -> impl Iterator<Item = (&str, &[String])> + '_ {
        self.ids
            .iter()
            .zip(&self.content)
            .filter_map(|(id, c)| c.as_deref().map(|c| (id.as_str(), c)))
    }

    /// Total degree (in + out) per node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = alloc::vec![0usize; self.len()];
        for &(s, t) in &self.edges {
            deg[s] += 1;
            deg[t] += 1;
        }
        deg
    }

    /// Neighbor lists of the undirected view, sorted ascending and deduplicated
    /// (a reciprocal pair a→b, b→a yields a single undirected neighbor).
    pub fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = alloc::vec![Vec::new(); self.len()];
        for &(s, t) in &self.edges {
            adj[s].push(t);
            adj[t].push(s);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Documents linked to `index` in either direction.
    pub fn linked_documents(&self, index: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter_map(|&(s, t)| {
                if s == index {
                    Some(t)
                } else if t == index {
                    Some(s)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Copy with every edge touching `id` removed. The document stays as an
    /// isolated node.
    pub fn hide_links(&self, id: &str) -> Result<Self> {
        let i = self.require(id)?;
        let mut out = self.clone();
        out.edges.retain(|&(s, t)| s != i && t != i);
        out.edge_set.retain(|&(s, t)| s != i && t != i);
        Ok(out)
    }

    /// Copy with the content of `id` removed; edges untouched.
    pub fn hide_content(&self, id: &str) -> Result<Self> {
        let i = self.require(id)?;
        if !self.has_content(i) {
            return Err(Error::ContentMissing(id.to_string()));
        }
        let mut out = self.clone();
        out.content[i] = None;
        Ok(out)
    }

    pub fn stats(&self) -> NetworkStats {
        let deg = self.degrees();
        NetworkStats {
            n_documents: self.len(),
            n_links: self.edges.len(),
            n_with_content: self.content.iter().filter(|c| c.is_some()).count(),
            n_isolated: deg.iter().filter(|&&d| d == 0).count(),
        }
    }
}
