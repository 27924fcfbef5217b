//! Leave-one-out evaluation: neighborhood reconstruction for documents whose
//! links are hidden, and similar-document retrieval for documents whose content
//! is hidden.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::align::{build_dictionary, default_dictionary_size, learn_projection, rank_aligned_ids};
use crate::corpus::DocumentNetwork;
use crate::embedding::{train_content_embeddings, train_node_embeddings, EmbeddingMatrix, TrainConfig};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng;
use crate::walks::{generate_walks, FrequencyTable, WalkConfig};

pub const DEFAULT_N_VALUES: [usize; 4] = [5, 10, 20, 50];
pub const DEFAULT_THRESHOLD: f64 = 0.2;
pub const RANDOM_POOL: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSize {
    All,
    Count(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub sample_size: SampleSize,
    pub threshold: f64,
    pub n_values: Vec<usize>,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            sample_size: SampleSize::Count(100),
            threshold: DEFAULT_THRESHOLD,
            n_values: DEFAULT_N_VALUES.to_vec(),
            seed: 0,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.threshold.is_finite() {
            return Err(Error::InvalidConfig("threshold must be finite"));
        }
        if self.n_values.contains(&0) {
            return Err(Error::InvalidConfig("every n must be at least 1"));
        }
        Ok(())
    }

    /// Seed for one stage of one left-out document.
    pub fn document_seed(&self, doc: usize, stage: u64) -> u64 {
        rng::derive_seed(self.seed, &[doc as u64, stage])
    }
}

/// `|top-n ∩ truth| / n`. A ranking shorter than `n` is scored over the
/// available prefix, still divided by `n`.
pub fn precision_at_n<T: Ord>(ranked: &[T], truth: &BTreeSet<T>, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n > ranked.len() {
        log::warn!("P@{n} over a ranking of {}; scoring the available prefix", ranked.len());
    }
    let hits = ranked.iter().take(n).filter(|x| truth.contains(*x)).count();
    hits as f64 / n as f64
}

/// Row positions of `candidates` sorted by descending cosine with `query`,
/// ties by ascending position. Rows equal to `exclude` are skipped.
pub fn rank_by_cosine(query: &[f64], candidates: &EmbeddingMatrix, exclude: Option<&str>) -> Result<Vec<usize>> {
    if query.len() != candidates.dim() {
        return Err(Error::DimensionMismatch { expected: candidates.dim(), found: query.len() });
    }
    let qn = linalg::norm(query);
    if qn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let skip = exclude.and_then(|id| candidates.position(id));
    let mut scored: Vec<(f64, usize)> = (0..candidates.len())
        .filter(|&r| Some(r) != skip)
        .map(|r| {
            let row = candidates.row(r);
            let rn = linalg::norm(row);
            let cos = if rn == 0.0 { f64::NEG_INFINITY } else { linalg::dot(query, row) / (qn * rn) };
            (cos, r)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(scored.into_iter().map(|(_, r)| r).collect())
}

fn ids_of(rows: &[usize], m: &EmbeddingMatrix) -> Vec<String> {
    rows.iter().map(|&r| m.ids()[r].clone()).collect()
}

/// Node-space ids ranked by similarity to the translated content vector of `id`.
pub fn rank_by_translated_node(
    id: &str,
    content: &EmbeddingMatrix,
    w: &crate::align::ProjectionMatrix,
    nodes: &EmbeddingMatrix,
) -> Result<Vec<String>> {
    let b = content.get(id).ok_or_else(|| Error::UnknownId(id.into()))?;
    let estimated = w.content_to_node(b)?;
    Ok(ids_of(&rank_by_cosine(&estimated, nodes, Some(id))?, nodes))
}

/// Content-space ids ranked by similarity to the content vector of `id`.
pub fn baseline_content_rank(id: &str, content: &EmbeddingMatrix) -> Result<Vec<String>> {
    let b = content.get(id).ok_or_else(|| Error::UnknownId(id.into()))?;
    Ok(ids_of(&rank_by_cosine(b, content, Some(id))?, content))
}

/// Node indices of the highest-degree documents (ties by index), at most `pool`.
pub fn top_degree_nodes(net: &DocumentNetwork, pool: usize) -> Vec<usize> {
    let deg = net.degrees();
    let mut order: Vec<usize> = (0..net.len()).collect();
    order.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    order.truncate(pool);
    order
}

/// The 200 highest-degree documents in a seeded random order.
pub fn baseline_random200(net: &DocumentNetwork, seed: u64) -> Vec<String> {
    let mut pool = top_degree_nodes(net, RANDOM_POOL);
    pool.shuffle(&mut rng::seeded(seed, &[]));
    pool.into_iter().map(|i| net.ids()[i].clone()).collect()
}

/// `{j ≠ id : cos(v_id, v_j) > threshold}`.
pub fn true_similar_set(content: &EmbeddingMatrix, id: &str, threshold: f64) -> Result<BTreeSet<String>> {
    let v = content.get(id).ok_or_else(|| Error::UnknownId(id.into()))?;
    threshold_set(v, content, Some(id), threshold)
}

/// Ids whose cosine with `query` strictly exceeds `threshold`.
pub fn threshold_set(
    query: &[f64],
    candidates: &EmbeddingMatrix,
    exclude: Option<&str>,
    threshold: f64,
) -> Result<BTreeSet<String>> {
    let qn = linalg::norm(query);
    if qn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut out = BTreeSet::new();
    for (cid, row) in candidates.iter() {
        if Some(cid) == exclude {
            continue;
        }
        let rn = linalg::norm(row);
        if rn > 0.0 && linalg::dot(query, row) / (qn * rn) > threshold {
            out.insert(String::from(cid));
        }
    }
    Ok(out)
}

/// Seeded sample of `eligible` (all of it for [`SampleSize::All`]), returned
/// in ascending order.
pub fn sample_documents(eligible: &[usize], size: SampleSize, seed: u64) -> Result<Vec<usize>> {
    let mut picked = match size {
        SampleSize::All => eligible.to_vec(),
        SampleSize::Count(k) if k > eligible.len() => {
            return Err(Error::OutOfRange { requested: k, available: eligible.len() })
        }
        SampleSize::Count(k) => {
            let mut pool = eligible.to_vec();
            pool.shuffle(&mut rng::seeded(seed, &[u64::MAX]));
            pool.truncate(k);
            pool
        }
    };
    picked.sort_unstable();
    Ok(picked)
}

/// Fraction of bootstrap resamples of `diffs` whose mean is strictly positive.
pub fn bootstrap_win_rate(diffs: &[f64], resamples: usize, seed: u64) -> f64 {
    if diffs.is_empty() || resamples == 0 {
        return 0.0;
    }
    let mut rng = rng::seeded(seed, &[]);
    let wins = (0..resamples)
        .filter(|_| {
            let total: f64 = (0..diffs.len()).map(|_| diffs[rng.random_range(0..diffs.len())]).sum();
            total > 0.0
        })
        .count();
    wins as f64 / resamples as f64
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// `(method − base) / base`, undefined for a zero baseline.
pub fn relative_gain(method: f64, base: f64) -> Option<f64> {
    (base > 0.0).then(|| (method - base) / base)
}

// ---------------------------------------------------------------------------
// Missing links

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LinkMethod {
    /// Translated content vector ranked against node vectors.
    Translated,
    /// Content-vector cosine.
    ContentCosine,
    /// Random order over the 200 highest-degree documents.
    Random200,
}

impl LinkMethod {
    pub const ALL: [LinkMethod; 3] = [LinkMethod::Translated, LinkMethod::ContentCosine, LinkMethod::Random200];

    pub fn name(self) -> &'static str {
        match self {
            LinkMethod::Translated => "translated",
            LinkMethod::ContentCosine => "content-cosine",
            LinkMethod::Random200 => "random200",
        }
    }
}

/// Training and alignment settings shared by both protocols.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSetup {
    pub walks: WalkConfig,
    pub train: TrainConfig,
    /// Dictionary size; `None` selects [`default_dictionary_size`].
    pub dictionary_size: Option<usize>,
    pub protocol: ProtocolConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkDocResult {
    pub id: String,
    pub n_links: usize,
    /// P@n per method, aligned with the protocol's `n_values`.
    pub translated: Vec<f64>,
    pub content_cosine: Vec<f64>,
    pub random200: Vec<f64>,
    pub dictionary_size: usize,
    pub orthogonality_residual: f64,
}

impl LinkDocResult {
    pub fn scores(&self, method: LinkMethod) -> &[f64] {
        match method {
            LinkMethod::Translated => &self.translated,
            LinkMethod::ContentCosine => &self.content_cosine,
            LinkMethod::Random200 => &self.random200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkEvalReport {
    pub n_values: Vec<usize>,
    pub documents: Vec<LinkDocResult>,
    /// Sampled documents with no links, hence no target.
    pub skipped_no_links: usize,
}

impl LinkEvalReport {
    pub fn average(&self, method: LinkMethod) -> Vec<f64> {
        (0..self.n_values.len())
            .map(|k| mean(self.documents.iter().map(|d| d.scores(method)[k])))
            .collect()
    }

    /// Relative gain of the translated method over `baseline`, per n.
    pub fn gain_over(&self, baseline: LinkMethod) -> Vec<Option<f64>> {
        let ours = self.average(LinkMethod::Translated);
        let base = self.average(baseline);
        ours.iter().zip(&base).map(|(&o, &b)| relative_gain(o, b)).collect()
    }

    pub fn max_orthogonality_residual(&self) -> f64 {
        self.documents.iter().map(|d| d.orthogonality_residual).fold(0.0, f64::max)
    }
}

/// Documents to leave out: a seeded sample of those with a content vector.
pub fn link_protocol_sample(net: &DocumentNetwork, content: &EmbeddingMatrix, cfg: &ProtocolConfig) -> Result<Vec<usize>> {
    let eligible: Vec<usize> = (0..net.len()).filter(|&i| content.contains(&net.ids()[i])).collect();
    sample_documents(&eligible, cfg.sample_size, cfg.seed)
}

/// Hides the links of one document, retrains node vectors on the remainder,
/// aligns, and scores all three rankings against its true neighbors.
///
/// Returns `Ok(None)` when the document has no links.
pub fn evaluate_link_document(
    net: &DocumentNetwork,
    content: &EmbeddingMatrix,
    setup: &ProtocolSetup,
    doc: usize,
) -> Result<Option<LinkDocResult>> {
    let id = net.id_of(doc).ok_or(Error::OutOfRange { requested: doc + 1, available: net.len() })?;
    let truth: BTreeSet<String> = net.linked_documents(doc).into_iter().map(|j| net.ids()[j].clone()).collect();
    if truth.is_empty() {
        return Ok(None);
    }
    let p = &setup.protocol;
    let sub = net.hide_links(id)?;
    let walk_cfg = WalkConfig { seed: p.document_seed(doc, 0), ..setup.walks };
    let corpus = generate_walks(&sub, &walk_cfg)?;
    let train_cfg = TrainConfig { seed: p.document_seed(doc, 1), ..setup.train };
    let nodes = train_node_embeddings(&corpus, &train_cfg)?;

    let freq = corpus.frequency_table();
    let m = setup
        .dictionary_size
        .unwrap_or_else(|| default_dictionary_size(rank_aligned_ids(&freq, &nodes, content).len()));
    let dict = build_dictionary(&freq, &nodes, content, m)?;
    let w = learn_projection(&nodes, content, &dict)?;

    let translated = rank_by_translated_node(id, content, &w, &nodes)?;
    let by_content = baseline_content_rank(id, content)?;
    let random: Vec<String> = baseline_random200(&sub, p.document_seed(doc, 2))
        .into_iter()
        .filter(|c| c != id)
        .collect();

    let score = |ranked: &[String]| -> Vec<f64> {
        p.n_values.iter().map(|&n| precision_at_n(ranked, &truth, n)).collect()
    };
    Ok(Some(LinkDocResult {
        id: id.into(),
        n_links: truth.len(),
        translated: score(&translated),
        content_cosine: score(&by_content),
        random200: score(&random),
        dictionary_size: dict.m(),
        orthogonality_residual: w.orthogonality_residual(),
    }))
}

pub fn assemble_link_report(n_values: &[usize], results: Vec<Option<LinkDocResult>>) -> LinkEvalReport {
    let skipped_no_links = results.iter().filter(|r| r.is_none()).count();
    LinkEvalReport { n_values: n_values.to_vec(), documents: results.into_iter().flatten().collect(), skipped_no_links }
}

/// Missing-links protocol over a sample of documents, sequentially.
///
/// `content` holds content vectors trained once on the full corpus.
pub fn run_link_protocol(net: &DocumentNetwork, content: &EmbeddingMatrix, setup: &ProtocolSetup) -> Result<LinkEvalReport> {
    setup.protocol.validate()?;
    let sample = link_protocol_sample(net, content, &setup.protocol)?;
    let results = sample
        .into_iter()
        .map(|doc| evaluate_link_document(net, content, setup, doc))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_link_report(&setup.protocol.n_values, results))
}

// ---------------------------------------------------------------------------
// Missing content

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SetScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub estimated_size: usize,
}

impl SetScores {
    /// Scores `estimated` against a non-empty `truth`. Precision of an empty
    /// estimate is 0.
    pub fn compare(estimated: &BTreeSet<String>, truth: &BTreeSet<String>) -> Self {
        let hits = estimated.intersection(truth).count() as f64;
        let precision = if estimated.is_empty() { 0.0 } else { hits / estimated.len() as f64 };
        let recall = if truth.is_empty() { 0.0 } else { hits / truth.len() as f64 };
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        Self { precision, recall, f1, estimated_size: estimated.len() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ContentMethod {
    /// Translated node vector thresholded against content vectors.
    Translated,
    /// Node-vector cosine.
    NodeCosine,
}

impl ContentMethod {
    pub const ALL: [ContentMethod; 2] = [ContentMethod::Translated, ContentMethod::NodeCosine];

    pub fn name(self) -> &'static str {
        match self {
            ContentMethod::Translated => "translated",
            ContentMethod::NodeCosine => "node-cosine",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContentDocResult {
    pub id: String,
    pub truth_size: usize,
    pub translated: SetScores,
    pub node_cosine: SetScores,
    pub dictionary_size: usize,
    pub orthogonality_residual: f64,
}

impl ContentDocResult {
    pub fn scores(&self, method: ContentMethod) -> &SetScores {
        match method {
            ContentMethod::Translated => &self.translated,
            ContentMethod::NodeCosine => &self.node_cosine,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContentEvalReport {
    pub threshold: f64,
    pub documents: Vec<ContentDocResult>,
    /// Sampled documents whose true similar set was empty.
    pub skipped_empty_truth: usize,
}

impl ContentEvalReport {
    /// Mean precision, recall and F1 for `method`.
    pub fn average(&self, method: ContentMethod) -> SetScores {
        let docs = &self.documents;
        SetScores {
            precision: mean(docs.iter().map(|d| d.scores(method).precision)),
            recall: mean(docs.iter().map(|d| d.scores(method).recall)),
            f1: mean(docs.iter().map(|d| d.scores(method).f1)),
            estimated_size: 0,
        }
    }

    pub fn max_orthogonality_residual(&self) -> f64 {
        self.documents.iter().map(|d| d.orthogonality_residual).fold(0.0, f64::max)
    }
}

/// Inputs trained once on the whole network and corpus.
#[derive(Debug, Clone, Copy)]
pub struct ContentProtocolInput<'a> {
    pub net: &'a DocumentNetwork,
    /// Node vectors from the full network.
    pub nodes: &'a EmbeddingMatrix,
    /// Walk frequencies from the full network, for dictionary construction.
    pub frequencies: &'a FrequencyTable,
    /// Content vectors from the full corpus; they define the true similar sets.
    pub content: &'a EmbeddingMatrix,
}

/// Documents to leave out: a seeded sample of those with both vectors.
pub fn content_protocol_sample(input: &ContentProtocolInput<'_>, cfg: &ProtocolConfig) -> Result<Vec<usize>> {
    let ids = input.net.ids();
    let eligible: Vec<usize> = (0..ids.len())
        .filter(|&i| input.nodes.contains(&ids[i]) && input.content.contains(&ids[i]) && input.net.has_content(i))
        .collect();
    sample_documents(&eligible, cfg.sample_size, cfg.seed)
}

/// Hides the content of one document, retrains content vectors on the rest,
/// aligns, and compares the estimated similar set with the true one.
///
/// Returns `Ok(None)` when the true similar set is empty.
pub fn evaluate_content_document(
    input: &ContentProtocolInput<'_>,
    setup: &ProtocolSetup,
    doc: usize,
) -> Result<Option<ContentDocResult>> {
    let net = input.net;
    let id = net.id_of(doc).ok_or(Error::OutOfRange { requested: doc + 1, available: net.len() })?;
    let p = &setup.protocol;
    let truth = true_similar_set(input.content, id, p.threshold)?;
    if truth.is_empty() {
        return Ok(None);
    }
    let node_vec = input.nodes.get(id).ok_or_else(|| Error::UnknownId(id.into()))?;

    let sub = net.hide_content(id)?;
    let train_cfg = TrainConfig { seed: p.document_seed(doc, 1), ..setup.train };
    let content = train_content_embeddings(sub.documents(), &train_cfg)?;

    let m = setup.dictionary_size.unwrap_or_else(|| {
        default_dictionary_size(rank_aligned_ids(input.frequencies, input.nodes, &content).len())
    });
    let dict = build_dictionary(input.frequencies, input.nodes, &content, m)?;
    let w = learn_projection(input.nodes, &content, &dict)?;

    let estimated = w.node_to_content(node_vec)?;
    let translated = threshold_set(&estimated, &content, Some(id), p.threshold)?;
    let by_nodes = threshold_set(node_vec, input.nodes, Some(id), p.threshold)?;

    Ok(Some(ContentDocResult {
        id: id.into(),
        truth_size: truth.len(),
        translated: SetScores::compare(&translated, &truth),
        node_cosine: SetScores::compare(&by_nodes, &truth),
        dictionary_size: dict.m(),
        orthogonality_residual: w.orthogonality_residual(),
    }))
}

pub fn assemble_content_report(threshold: f64, results: Vec<Option<ContentDocResult>>) -> ContentEvalReport {
    let skipped_empty_truth = results.iter().filter(|r| r.is_none()).count();
    ContentEvalReport { threshold, documents: results.into_iter().flatten().collect(), skipped_empty_truth }
}

/// Missing-content protocol over a sample of documents, sequentially.
pub fn run_content_protocol(input: &ContentProtocolInput<'_>, setup: &ProtocolSetup) -> Result<ContentEvalReport> {
    setup.protocol.validate()?;
    let sample = content_protocol_sample(input, &setup.protocol)?;
    let results = sample
        .into_iter()
        .map(|doc| evaluate_content_document(input, setup, doc))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_content_report(setup.protocol.threshold, results))
}
