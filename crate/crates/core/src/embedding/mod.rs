//! Node embeddings (skip-gram over random walks) and content embeddings
//! (paragraph vectors), both trained with negative sampling.

mod matrix;
mod node;
mod paragraph;
pub mod sgns;
pub mod store;

pub use matrix::EmbeddingMatrix;
pub use node::{train_node_embeddings, train_node_model, NodeModel};
pub use paragraph::{train_content_embeddings, train_content_model, ParagraphModel};
pub use sgns::{sgns_loss, sgns_step};

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Skip-gram with negative sampling over walks.
    NodeSgns,
    /// Paragraph vector, distributed memory: document and context words
    /// are averaged to predict the center word.
    DvDm,
    /// Paragraph vector, distributed bag of words: the document alone
    /// predicts each of its words.
    DvDbow,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::NodeSgns => "node-sgns",
            Variant::DvDm => "dv-dm",
            Variant::DvDbow => "dv-dbow",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "node-sgns" => Some(Variant::NodeSgns),
            "dv-dm" => Some(Variant::DvDm),
            "dv-dbow" => Some(Variant::DvDbow),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    /// Words seen fewer times are dropped (content training only).
    pub min_count: u64,
    pub seed: u64,
    pub variant: Variant,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 500,
            window: 10,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_count: 2,
            seed: 0,
            variant: Variant::NodeSgns,
        }
    }
}

impl TrainConfig {
    pub fn with_variant(self, variant: Variant) -> Self {
        Self { variant, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dim must be at least 1"));
        }
        if self.window == 0 {
            return Err(Error::InvalidConfig("window must be at least 1"));
        }
        if self.negatives == 0 {
            return Err(Error::InvalidConfig("negatives must be at least 1"));
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return Err(Error::InvalidConfig("initial_lr must be positive"));
        }
        Ok(())
    }
}

/// Embeddings plus the mean per-example loss of each epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub embeddings: EmbeddingMatrix,
    pub epoch_losses: Vec<f64>,
}

/// Running loss over one epoch (or one shard of it).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EpochLoss {
    pub sum: f64,
    pub examples: u64,
}

impl EpochLoss {
    pub fn merge(self, other: Self) -> Self {
        Self { sum: self.sum + other.sum, examples: self.examples + other.examples }
    }

    pub fn mean(&self) -> f64 {
        if self.examples == 0 {
            0.0
        } else {
            self.sum / self.examples as f64
        }
    }
}

// RNG stream tags.
const STREAM_INIT: u64 = 0;
const STREAM_TRAIN: u64 = 1;

fn init_uniform(rows: usize, dim: usize, seed: u64) -> Vec<f32> {
    use rand::Rng as _;
    let mut rng = crate::rng::seeded(seed, &[STREAM_INIT]);
    let scale = 1.0 / dim as f32;
    (0..rows * dim).map(|_| (rng.random::<f32>() - 0.5) * scale).collect()
}

/// RNG for worker `worker` during training with `seed`.
pub fn worker_rng(seed: u64, worker: usize) -> crate::rng::Rng {
    crate::rng::seeded(seed, &[STREAM_TRAIN, worker as u64])
}
