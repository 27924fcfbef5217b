use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use super::sgns::{sgns_update, LrSchedule, NoiseTable};
use super::store::{DenseStore, VectorStore};
use super::{init_uniform, worker_rng, EmbeddingMatrix, EpochLoss, TrainConfig, Trained, Variant};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Paragraph-vector training state.
///
/// Input rows `0..n_docs` hold document vectors and rows `n_docs..` hold word
/// vectors; output rows are per word.
#[derive(Debug, Clone)]
pub struct ParagraphModel {
    cfg: TrainConfig,
    doc_ids: Vec<String>,
    docs: Vec<Vec<usize>>,
    n_words: usize,
    noise: NoiseTable,
    tokens: u64,
    track_loss: bool,
}

impl ParagraphModel {
    pub fn new<'a, I>(documents: I, cfg: &TrainConfig) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a [String])>,
    {
        cfg.validate()?;
        if cfg.variant == Variant::NodeSgns {
            return Err(Error::InvalidConfig("content training requires dv-dm or dv-dbow"));
        }
        let documents: Vec<(&str, &[String])> = documents.into_iter().collect();

        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
        for (_, tokens) in &documents {
            for t in tokens.iter() {
                *counts.entry(t.as_str()).or_default() += 1;
            }
        }
        // Vocabulary in first-appearance order.
        let mut vocab: BTreeMap<&str, usize> = BTreeMap::new();
        let mut word_counts = Vec::new();
        let mut doc_ids = Vec::new();
        let mut docs = Vec::new();
        for (id, tokens) in &documents {
            let kept: Vec<usize> = tokens
                .iter()
                .filter(|t| counts[t.as_str()] >= cfg.min_count)
                .map(|t| {
                    *vocab.entry(t.as_str()).or_insert_with(|| {
                        word_counts.push(counts[t.as_str()]);
                        word_counts.len() - 1
                    })
                })
                .collect();
            if !kept.is_empty() {
                doc_ids.push(String::from(*id));
                docs.push(kept);
            }
        }
        let noise = NoiseTable::new(&word_counts).ok_or(Error::Empty("no document has a retained token"))?;
        let tokens = docs.iter().map(|d| d.len() as u64).sum();
        Ok(Self { cfg: *cfg, doc_ids, docs, n_words: word_counts.len(), noise, tokens, track_loss: true })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    /// Whether training passes report their loss (on by default). Turning
    /// it off saves two transcendental calls per update.
    pub fn with_loss_tracking(mut self, on: bool) -> Self {
        self.track_loss = on;
        self
    }

    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn n_words(&self) -> usize {
        self.n_words
    }

    pub fn initial_inputs(&self) -> Vec<f32> {
        init_uniform(self.n_docs() + self.n_words, self.cfg.dim, self.cfg.seed)
    }

    pub fn initial_outputs(&self) -> Vec<f32> {
        vec![0.0; self.n_words * self.cfg.dim]
    }

    pub fn total_work(&self) -> u64 {
        self.tokens * self.cfg.epochs as u64
    }

    /// One pass over the documents in `range`.
    pub fn train_docs<S: VectorStore<f32>>(
        &self,
        range: core::ops::Range<usize>,
        inputs: &mut S,
        outputs: &mut S,
        rng: &mut Rng,
        schedule: &LrSchedule,
        done: &mut u64,
    ) -> EpochLoss {
        self.pass(range, inputs, outputs, rng, schedule, done, self.track_loss)
    }

    #[allow(clippy::too_many_arguments)]
    fn pass<S: VectorStore<f32>>(
        &self,
        range: core::ops::Range<usize>,
        inputs: &mut S,
        outputs: &mut S,
        rng: &mut Rng,
        schedule: &LrSchedule,
        done: &mut u64,
        track_loss: bool,
    ) -> EpochLoss {
        let dim = self.cfg.dim;
        let n_docs = self.n_docs();
        let mut hidden = vec![0.0f32; dim];
        let mut scratch = vec![0.0f32; dim];
        let mut grad = vec![0.0f32; dim];
        let mut negatives = Vec::with_capacity(self.cfg.negatives);
        let mut context_rows = Vec::with_capacity(2 * self.cfg.window);
        let mut loss = EpochLoss::default();

        for d in range {
            let words = &self.docs[d];
            for (pos, &word) in words.iter().enumerate() {
                let lr = schedule.at(*done) as f32;
                *done += 1;
                grad.iter_mut().for_each(|g| *g = 0.0);
                self.noise.fill(rng, word, &mut negatives, self.cfg.negatives);
                let l = match self.cfg.variant {
                    Variant::DvDbow => {
                        inputs.read(d, &mut hidden);
                        let l = sgns_update(&hidden, outputs, word, &negatives, lr, &mut grad, track_loss);
                        inputs.add(d, 1.0, &grad);
                        l
                    }
                    _ => {
                        let reach = self.cfg.window - rng.random_range(0..self.cfg.window);
                        let lo = pos.saturating_sub(reach);
                        let hi = (pos + reach).min(words.len() - 1);
                        context_rows.clear();
                        context_rows.push(d);
                        context_rows.extend(
                            (lo..=hi).filter(|&j| j != pos).map(|j| n_docs + words[j]),
                        );
                        hidden.iter_mut().for_each(|h| *h = 0.0);
                        for &row in &context_rows {
                            inputs.read(row, &mut scratch);
                            hidden.iter_mut().zip(&scratch).for_each(|(h, s)| *h += s);
                        }
                        let inv = 1.0 / context_rows.len() as f32;
                        hidden.iter_mut().for_each(|h| *h *= inv);
                        let l = sgns_update(&hidden, outputs, word, &negatives, lr, &mut grad, track_loss);
                        // Every averaged input receives the full hidden-layer
                        // error, as in the word2vec CBOW-mean update.
                        for &row in &context_rows {
                            inputs.add(row, 1.0, &grad);
                        }
                        l
                    }
                };
                loss.sum += l as f64;
                loss.examples += 1;
            }
        }
        loss
    }

    /// Mean loss over all documents at the current parameters.
    pub fn objective<S: VectorStore<f32>>(&self, inputs: &mut S, outputs: &mut S, rng: &mut Rng) -> f64 {
        let frozen = LrSchedule { initial: 0.0, total: 0 };
        self.pass(0..self.n_docs(), inputs, outputs, rng, &frozen, &mut 0, true).mean()
    }

    pub fn finish(&self, inputs: &[f32]) -> EmbeddingMatrix {
        let dim = self.cfg.dim;
        let mut out = EmbeddingMatrix::new(dim);
        let mut buf = vec![0.0f64; dim];
        for (d, id) in self.doc_ids.iter().enumerate() {
            for (b, &x) in buf.iter_mut().zip(&inputs[d * dim..(d + 1) * dim]) {
                *b = x as f64;
            }
            out.push(id, &buf).expect("unique ids with matching dim");
        }
        out
    }
}

/// Deterministic single-worker paragraph-vector training.
pub fn train_content_model<'a, I>(documents: I, cfg: &TrainConfig) -> Result<Trained>
where
    I: IntoIterator<Item = (&'a str, &'a [String])>,
{
    train(ParagraphModel::new(documents, cfg)?, cfg)
}

fn train(model: ParagraphModel, cfg: &TrainConfig) -> Result<Trained> {
    let mut inputs = DenseStore::new(cfg.dim, model.initial_inputs());
    let mut outputs = DenseStore::new(cfg.dim, model.initial_outputs());
    let schedule = LrSchedule { initial: cfg.initial_lr, total: model.total_work() };
    let mut rng = worker_rng(cfg.seed, 0);
    let mut done = 0;
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        let loss = model.train_docs(0..model.n_docs(), &mut inputs, &mut outputs, &mut rng, &schedule, &mut done);
        epoch_losses.push(loss.mean());
    }
    Ok(Trained { embeddings: model.finish(&inputs.into_inner()), epoch_losses })
}

pub fn train_content_embeddings<'a, I>(documents: I, cfg: &TrainConfig) -> Result<EmbeddingMatrix>
where
    I: IntoIterator<Item = (&'a str, &'a [String])>,
{
    train(ParagraphModel::new(documents, cfg)?.with_loss_tracking(false), cfg).map(|t| t.embeddings)
}
