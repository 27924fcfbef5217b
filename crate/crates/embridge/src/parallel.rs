//! Multi-worker drivers.
//!
//! Training with more than one worker shares vectors between threads without
//! locks, so results vary from run to run while quality does not. Walk
//! generation and the evaluation protocols use per-root and per-document
//! seeds, so their output does not depend on the worker count.

use std::thread;

use embridge_core::embedding::sgns::LrSchedule;
use embridge_core::embedding::store::AtomicStore;
use embridge_core::embedding::{train_content_model, train_node_model, worker_rng, EpochLoss, NodeModel, ParagraphModel, Trained};
use embridge_core::eval::{
    assemble_content_report, assemble_link_report, content_protocol_sample, evaluate_content_document,
    evaluate_link_document, link_protocol_sample, ContentEvalReport, ContentProtocolInput, LinkEvalReport,
    ProtocolSetup,
};
use embridge_core::walks::walks_from_roots;
use embridge_core::{DocumentNetwork, EmbeddingMatrix, Error, Result, TrainConfig, WalkConfig, WalkCorpus};
use rayon::prelude::*;

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool")
}

/// Same corpus as [`embridge_core::generate_walks`] for any worker count.
pub fn generate_walks(net: &DocumentNetwork, cfg: &WalkConfig, workers: usize) -> Result<WalkCorpus> {
    if workers <= 1 {
        return embridge_core::generate_walks(net, cfg);
    }
    cfg.validate()?;
    if net.is_empty() {
        return Err(Error::Empty("network has no documents"));
    }
    let adjacency = net.undirected_neighbors();
    let roots: Vec<usize> = (0..net.len()).collect();
    let chunk = roots.len().div_ceil(workers * 4);
    let pieces: Vec<Vec<Vec<usize>>> =
        pool(workers).install(|| roots.par_chunks(chunk).map(|r| walks_from_roots(&adjacency, r, cfg)).collect());
    WalkCorpus::from_walks(net.ids().to_vec(), pieces.into_iter().flatten().collect())
}

fn merge_losses(per_worker: Vec<Vec<EpochLoss>>, epochs: usize) -> Vec<f64> {
    (0..epochs)
        .map(|e| per_worker.iter().fold(EpochLoss::default(), |acc, w| acc.merge(w[e])).mean())
        .collect()
}

/// Node training; one worker is bit-deterministic, more run lock-free over
/// contiguous walk shards.
pub fn train_nodes(corpus: &WalkCorpus, cfg: &TrainConfig, workers: usize) -> Result<Trained> {
    if workers <= 1 {
        return train_node_model(corpus, cfg);
    }
    let model = NodeModel::new(corpus, cfg)?;
    let inputs = AtomicStore::new(cfg.dim, model.initial_inputs());
    let outputs = AtomicStore::new(cfg.dim, model.initial_outputs());
    let shard = corpus.walks.len().div_ceil(workers).max(1);
    let per_worker: Vec<Vec<EpochLoss>> = thread::scope(|s| {
        let handles: Vec<_> = corpus
            .walks
            .chunks(shard)
            .enumerate()
            .map(|(w, walks)| {
                let (model, inputs, outputs) = (&model, &inputs, &outputs);
                s.spawn(move || {
                    let tokens: u64 = walks.iter().map(|w| w.len() as u64).sum();
                    let schedule = LrSchedule { initial: cfg.initial_lr, total: tokens * cfg.epochs as u64 };
                    let (mut ins, mut outs) = (inputs, outputs);
                    let mut rng = worker_rng(cfg.seed, w);
                    let mut done = 0;
                    (0..cfg.epochs)
                        .map(|_| model.train_walks(walks, &mut ins, &mut outs, &mut rng, &schedule, &mut done))
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("training worker panicked")).collect()
    });
    Ok(Trained { embeddings: model.finish(&inputs.into_inner()), epoch_losses: merge_losses(per_worker, cfg.epochs) })
}

/// Content training, sharded by document as for [`train_nodes`].
pub fn train_content<'a, I>(documents: I, cfg: &TrainConfig, workers: usize) -> Result<Trained>
where
    I: IntoIterator<Item = (&'a str, &'a [String])>,
{
    if workers <= 1 {
        return train_content_model(documents, cfg);
    }
    let model = ParagraphModel::new(documents, cfg)?;
    let inputs = AtomicStore::new(cfg.dim, model.initial_inputs());
    let outputs = AtomicStore::new(cfg.dim, model.initial_outputs());
    let n = model.n_docs();
    let shard = n.div_ceil(workers).max(1);
    let per_worker: Vec<Vec<EpochLoss>> = thread::scope(|s| {
        let handles: Vec<_> = (0..n)
            .step_by(shard)
            .enumerate()
            .map(|(w, start)| {
                let (model, inputs, outputs) = (&model, &inputs, &outputs);
                let range = start..(start + shard).min(n);
                s.spawn(move || {
                    // Shards are near-equal, so each decays over its share of the work.
                    let schedule = LrSchedule { initial: cfg.initial_lr, total: model.total_work() * range.len() as u64 / n as u64 };
                    let (mut ins, mut outs) = (inputs, outputs);
                    let mut rng = worker_rng(cfg.seed, w);
                    let mut done = 0;
                    (0..cfg.epochs)
                        .map(|_| model.train_docs(range.clone(), &mut ins, &mut outs, &mut rng, &schedule, &mut done))
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("training worker panicked")).collect()
    });
    Ok(Trained { embeddings: model.finish(&inputs.into_inner()), epoch_losses: merge_losses(per_worker, cfg.epochs) })
}

/// Missing-links protocol with left-out documents spread over `workers`
/// threads. The report equals the sequential one.
pub fn run_link_protocol(
    net: &DocumentNetwork,
    content: &EmbeddingMatrix,
    setup: &ProtocolSetup,
    workers: usize,
) -> Result<LinkEvalReport> {
    setup.protocol.validate()?;
    let sample = link_protocol_sample(net, content, &setup.protocol)?;
    let results = pool(workers).install(|| {
        sample.par_iter().map(|&doc| evaluate_link_document(net, content, setup, doc)).collect::<Result<Vec<_>>>()
    })?;
    Ok(assemble_link_report(&setup.protocol.n_values, results))
}

/// Missing-content protocol over `workers` threads.
pub fn run_content_protocol(
    input: &ContentProtocolInput<'_>,
    setup: &ProtocolSetup,
    workers: usize,
) -> Result<ContentEvalReport> {
    setup.protocol.validate()?;
    let sample = content_protocol_sample(input, &setup.protocol)?;
    let results = pool(workers).install(|| {
        sample.par_iter().map(|&doc| evaluate_content_document(input, setup, doc)).collect::<Result<Vec<_>>>()
    })?;
    Ok(assemble_content_report(setup.protocol.threshold, results))
}
