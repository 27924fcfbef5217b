use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};

/// Id-indexed dense vectors sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    dim: usize,
    ids: Vec<String>,
    index: BTreeMap<String, usize>,
    data: Vec<f64>,
    normalized: bool,
}

impl EmbeddingMatrix {
    pub fn new(dim: usize) -> Self {
        Self { dim, ids: Vec::new(), index: BTreeMap::new(), data: Vec::new(), normalized: false }
    }

    pub fn push(&mut self, id: &str, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: vector.len() });
        }
        if self.index.contains_key(id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        self.index.insert(id.to_string(), self.ids.len());
        self.ids.push(id.to_string());
        self.data.extend_from_slice(vector);
        self.normalized = false;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.position(id).map(|i| self.row(i))
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> + '_ {
        (0..self.len()).map(move |i| (self.ids[i].as_str(), self.row(i)))
    }

    /// Copy with every row scaled to unit norm.
    pub fn row_normalized(&self) -> Result<Self> {
        let mut out = self.clone();
        for i in 0..out.len() {
            let dim = out.dim;
            linalg::normalize(&mut out.data[i * dim..(i + 1) * dim])
                .map_err(|_| Error::ZeroRow(i))?;
        }
        out.normalized = true;
        Ok(out)
    }

    /// Copy with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= factor);
        out.normalized = false;
        out
    }

    /// Rows of `ids`, stacked in that order.
    pub fn stack(&self, ids: &[String]) -> Result<DenseMatrix> {
        let mut data = Vec::with_capacity(ids.len() * self.dim);
        for id in ids {
            let v = self.get(id).ok_or_else(|| Error::UnknownId(id.clone()))?;
            data.extend_from_slice(v);
        }
        DenseMatrix::new(ids.len(), self.dim, data)
    }

    /// Applies `f` to every row, producing a matrix of dimension `dim`.
    pub fn map_rows<F>(&self, dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Result<Vec<f64>>,
    {
        let mut out = Self::new(dim);
        for (id, v) in self.iter() {
            out.push(id, &f(v)?)?;
        }
        Ok(out)
    }
}
