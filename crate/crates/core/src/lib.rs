//! Node and content embeddings for document networks, aligned by an
//! orthogonal map so each space can stand in for the other when a document's
//! links or content are missing.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, threading and
//! the command line live in the `embridge` crate.

#![no_std]

extern crate alloc;

pub mod align;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod rng;
pub mod walks;

pub use align::{
    build_dictionary, cosine, learn_projection, translate_content_to_node, translate_node_to_content,
    AlignmentDictionary, ProjectionMatrix,
};
pub use corpus::{tokenize, DocumentNetwork, NetworkStats};
pub use embedding::{
    sgns_step, train_content_embeddings, train_node_embeddings, EmbeddingMatrix, TrainConfig, Variant,
};
pub use error::{Error, Result};
pub use linalg::{svd_square, DenseMatrix, Svd};
pub use walks::{generate_walks, FrequencyTable, WalkConfig, WalkCorpus};
