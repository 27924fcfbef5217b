use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::sgns::{sgns_update, LrSchedule, NoiseTable};
use super::store::{DenseStore, VectorStore};
use super::{init_uniform, worker_rng, EmbeddingMatrix, EpochLoss, TrainConfig, Trained, Variant};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::walks::WalkCorpus;

/// Skip-gram training state derived from a walk corpus.
///
/// Only nodes that occur in some walk of two or more nodes are trainable:
/// a node whose walks never leave it has no co-occurrence signal and gets
/// no vector.
#[derive(Debug, Clone)]
pub struct NodeModel<'a> {
    corpus: &'a WalkCorpus,
    cfg: TrainConfig,
    trainable: Vec<bool>,
    noise: NoiseTable,
    tokens: u64,
    track_loss: bool,
}

impl<'a> NodeModel<'a> {
    pub fn new(corpus: &'a WalkCorpus, cfg: &TrainConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.variant != Variant::NodeSgns {
            return Err(Error::InvalidConfig("node training requires the node-sgns variant"));
        }
        if corpus.is_empty() {
            return Err(Error::Empty("walk corpus"));
        }
        let n = corpus.node_ids.len();
        let mut trainable = vec![false; n];
        for walk in corpus.walks.iter().filter(|w| w.len() > 1) {
            for &v in walk {
                trainable[v] = true;
            }
        }
        let counts: Vec<u64> = corpus
            .frequencies
            .iter()
            .zip(&trainable)
            .map(|(&f, &t)| if t { f } else { 0 })
            .collect();
        // Fall back to raw counts so a corpus of single-node walks still
        // yields a (vacuous) model rather than an error.
        let noise = NoiseTable::new(&counts)
            .or_else(|| NoiseTable::new(&corpus.frequencies))
            .ok_or(Error::Empty("walk corpus"))?;
        let tokens = corpus.walks.iter().map(|w| w.len() as u64).sum();
        Ok(Self { corpus, cfg: *cfg, trainable, noise, tokens, track_loss: true })
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

    pub fn rows(&self) -> usize {
        self.corpus.node_ids.len()
    }

    pub fn is_trainable(&self, node: usize) -> bool {
        self.trainable[node]
    }

    pub fn initial_inputs(&self) -> Vec<f32> {
        init_uniform(self.rows(), self.cfg.dim, self.cfg.seed)
    }

    pub fn initial_outputs(&self) -> Vec<f32> {
        vec![0.0; self.rows() * self.cfg.dim]
    }

    /// Center tokens processed over all epochs.
    pub fn total_work(&self) -> u64 {
        self.tokens * self.cfg.epochs as u64
    }

    /// One pass over `walks` in a freshly shuffled order. `done` counts
    /// processed center tokens and drives the learning rate.
    pub fn train_walks<S: VectorStore<f32>>(
        &self,
        walks: &[Vec<usize>],
        inputs: &mut S,
        outputs: &mut S,
        rng: &mut Rng,
        schedule: &LrSchedule,
        done: &mut u64,
    ) -> EpochLoss {
        self.pass(walks, inputs, outputs, rng, schedule, done, self.track_loss)
    }

    #[allow(clippy::too_many_arguments)]
    fn pass<S: VectorStore<f32>>(
        &self,
        walks: &[Vec<usize>],
        inputs: &mut S,
        outputs: &mut S,
        rng: &mut Rng,
        schedule: &LrSchedule,
        done: &mut u64,
        track_loss: bool,
    ) -> EpochLoss {
        let dim = self.cfg.dim;
        let mut hidden = vec![0.0f32; dim];
        let mut grad = vec![0.0f32; dim];
        let mut negatives = Vec::with_capacity(self.cfg.negatives);
        let mut loss = EpochLoss::default();
        // Canonical corpus order groups all walks of a root together.
        let mut order: Vec<usize> = (0..walks.len()).collect();
        order.shuffle(rng);
        for walk in order.into_iter().map(|i| &walks[i]) {
            if walk.len() < 2 {
                *done += walk.len() as u64;
                continue;
            }
            for (pos, &center) in walk.iter().enumerate() {
                let lr = schedule.at(*done) as f32;
                *done += 1;
                // Sampled effective window in 1..=window.
                let reach = self.cfg.window - rng.random_range(0..self.cfg.window);
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(walk.len() - 1);
                for (offset, &context) in walk[lo..=hi].iter().enumerate() {
                    if lo + offset == pos {
                        continue;
                    }
                    inputs.read(center, &mut hidden);
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    self.noise.fill(rng, context, &mut negatives, self.cfg.negatives);
                    let l = sgns_update(&hidden, outputs, context, &negatives, lr, &mut grad, track_loss);
                    inputs.add(center, 1.0, &grad);
                    loss.sum += l as f64;
                    loss.examples += 1;
                }
            }
        }
        loss
    }

    /// Mean loss over `walks` at the current parameters (learning rate zero).
    pub fn objective<S: VectorStore<f32>>(&self, walks: &[Vec<usize>], inputs: &mut S, outputs: &mut S, rng: &mut Rng) -> f64 {
        let frozen = LrSchedule { initial: 0.0, total: 0 };
        self.pass(walks, inputs, outputs, rng, &frozen, &mut 0, true).mean()
    }

    /// Collects trained input vectors for trainable nodes, in index order.
    pub fn finish(&self, inputs: &[f32]) -> EmbeddingMatrix {
        let dim = self.cfg.dim;
        let mut out = EmbeddingMatrix::new(dim);
        let mut buf = vec![0.0f64; dim];
        for (i, id) in self.corpus.node_ids.iter().enumerate() {
            if !self.trainable[i] {
                continue;
            }
            for (b, &x) in buf.iter_mut().zip(&inputs[i * dim..(i + 1) * dim]) {
                *b = x as f64;
            }
            out.push(id, &buf).expect("unique ids with matching dim");
        }
        out
    }
}

/// Deterministic single-worker skip-gram training.
pub fn train_node_model(corpus: &WalkCorpus, cfg: &TrainConfig) -> Result<Trained> {
    train(NodeModel::new(corpus, cfg)?, cfg)
}

fn train(model: NodeModel<'_>, cfg: &TrainConfig) -> Result<Trained> {
    let corpus = model.corpus;
    let mut inputs = DenseStore::new(cfg.dim, model.initial_inputs());
    let mut outputs = DenseStore::new(cfg.dim, model.initial_outputs());
    let schedule = LrSchedule { initial: cfg.initial_lr, total: model.total_work() };
    let mut rng = worker_rng(cfg.seed, 0);
    let mut done = 0;
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        let loss = model.train_walks(&corpus.walks, &mut inputs, &mut outputs, &mut rng, &schedule, &mut done);
        epoch_losses.push(loss.mean());
    }
    Ok(Trained { embeddings: model.finish(&inputs.into_inner()), epoch_losses })
}

pub fn train_node_embeddings(corpus: &WalkCorpus, cfg: &TrainConfig) -> Result<EmbeddingMatrix> {
    // Per-epoch losses are not reported here, so skip computing them.
    train(NodeModel::new(corpus, cfg)?.with_loss_tracking(false), cfg).map(|t| t.embeddings)
}
