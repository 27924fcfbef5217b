//! Orthogonal alignment between the content space and the node space.
//!
//! Given row-normalized node vectors `a_i` and content vectors `b_i` for the
//! documents of a dictionary `S`, the orthogonal `W` maximizing
//! `Σ a_i · (b_i W)` is `W = V Uᵀ` where `A_Sᵀ B_S = U Σ Vᵀ`. Content vectors
//! map to the node space as `b W`; node vectors map back as `a Wᵀ`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, svd_square, DenseMatrix};
use crate::walks::FrequencyTable;

/// Fraction of eligible documents used for the dictionary when no size is given.
pub const DEFAULT_DICTIONARY_RATIO: f64 = 0.65;

/// Documents whose node and content vectors are paired to fit the projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentDictionary {
    ids: Vec<String>,
}

impl AlignmentDictionary {
    pub fn new(ids: Vec<String>) -> Result<Self> {
        let mut seen = alloc::collections::BTreeSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        Ok(Self { ids })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn m(&self) -> usize {
        self.ids.len()
    }
}

/// `⌈0.65 · available⌉`, capped at `available`.
pub fn default_dictionary_size(available: usize) -> usize {
    let m = libm::ceil(DEFAULT_DICTIONARY_RATIO * available as f64) as usize;
    m.min(available)
}

/// Ids present in both matrices, ranked by descending walk frequency
/// (ties by table order).
pub fn rank_aligned_ids(freq: &FrequencyTable, nodes: &EmbeddingMatrix, content: &EmbeddingMatrix) -> Vec<String> {
    let mut candidates: Vec<(usize, &(String, u64))> = freq
        .entries
        .iter()
        .enumerate()
        .filter(|(_, (id, _))| nodes.contains(id) && content.contains(id))
        .collect();
    candidates.sort_by(|(i, (_, fa)), (j, (_, fb))| fb.cmp(fa).then(i.cmp(j)));
    candidates.into_iter().map(|(_, (id, _))| id.clone()).collect()
}

/// The `m` most frequent documents that have both a node and a content vector.
pub fn build_dictionary(
    freq: &FrequencyTable,
    nodes: &EmbeddingMatrix,
    content: &EmbeddingMatrix,
    m: usize,
) -> Result<AlignmentDictionary> {
    let mut ranked = rank_aligned_ids(freq, nodes, content);
    if m == 0 || m > ranked.len() {
        return Err(Error::OutOfRange { requested: m, available: ranked.len() });
    }
    ranked.truncate(m);
    Ok(AlignmentDictionary { ids: ranked })
}

/// Orthogonal `k×k` map from content space to node space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    w: DenseMatrix,
}

impl ProjectionMatrix {
    pub fn from_matrix(w: DenseMatrix) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::DimensionMismatch { expected: w.rows(), found: w.cols() });
        }
        Ok(Self { w })
    }

    pub fn identity(k: usize) -> Self {
        Self { w: DenseMatrix::identity(k) }
    }

    pub fn dim(&self) -> usize {
        self.w.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.w
    }

    /// `max |WᵀW − I|`.
    pub fn orthogonality_residual(&self) -> f64 {
        self.w.orthogonality_residual()
    }

    pub fn content_to_node(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.w.left_mul_vec(b)
    }

    pub fn node_to_content(&self, a: &[f64]) -> Result<Vec<f64>> {
        self.w.left_mul_vec_transposed(a)
    }
}

/// Solves the orthogonal alignment for the dictionary rows.
///
/// Rows are re-normalized here regardless of the matrices' flags.
pub fn learn_projection(
    nodes: &EmbeddingMatrix,
    content: &EmbeddingMatrix,
    dict: &AlignmentDictionary,
) -> Result<ProjectionMatrix> {
    if nodes.dim() != content.dim() {
        return Err(Error::DimensionMismatch { expected: nodes.dim(), found: content.dim() });
    }
    if dict.m() == 0 {
        return Err(Error::Empty("alignment dictionary"));
    }
    let a_s = nodes.stack(dict.ids())?.row_normalize()?;
    let b_s = content.stack(dict.ids())?.row_normalize()?;
    procrustes(&a_s, &b_s)
}

/// Orthogonal `W` maximizing `Σ a_i · (b_i W)` over aligned rows.
pub fn procrustes(a_s: &DenseMatrix, b_s: &DenseMatrix) -> Result<ProjectionMatrix> {
    if a_s.cols() != b_s.cols() {
        return Err(Error::DimensionMismatch { expected: a_s.cols(), found: b_s.cols() });
    }
    let m = a_s.transpose_matmul(b_s)?;
    let svd = svd_square(&m)?;
    let w = svd.v.matmul(&svd.u.transpose())?;
    Ok(ProjectionMatrix { w })
}

/// `Σ_i a_i · (b_i W)`.
pub fn alignment_objective(a_s: &DenseMatrix, b_s: &DenseMatrix, w: &DenseMatrix) -> f64 {
    let bw = b_s.matmul(w).expect("compatible shapes");
    a_s.iter_rows().zip(bw.iter_rows()).map(|(a, b)| linalg::dot(a, b)).sum()
}

/// `Σ_i ‖a_i − b_i W‖²`.
pub fn alignment_residual(a_s: &DenseMatrix, b_s: &DenseMatrix, w: &DenseMatrix) -> f64 {
    let bw = b_s.matmul(w).expect("compatible shapes");
    a_s.data().iter().zip(bw.data()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Estimated node vector `b W` for a content vector.
pub fn translate_content_to_node(b: &[f64], w: &ProjectionMatrix) -> Result<Vec<f64>> {
    w.content_to_node(b)
}

/// Estimated content vector `a Wᵀ` for a node vector.
pub fn translate_node_to_content(a: &[f64], w: &ProjectionMatrix) -> Result<Vec<f64>> {
    w.node_to_content(a)
}

pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    let (nu, nv) = (linalg::norm(u), linalg::norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((linalg::dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}
