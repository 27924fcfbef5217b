//! Row storage for trainable vectors.
//!
//! [`DenseStore`] backs deterministic single-worker training. [`AtomicStore`]
//! lets several workers update shared rows without locks: every entry is a
//! relaxed atomic, so concurrent updates may interleave but never tear.

use alloc::vec::Vec;
use core::sync::atomic::{AtomicU32, Ordering};

use num_traits::Float;

pub trait VectorStore<T: Copy> {
    fn dim(&self) -> usize;
    fn read(&mut self, row: usize, out: &mut [T]);
    fn dot(&mut self, row: usize, v: &[T]) -> T;
    /// `row += alpha * v`
    fn add(&mut self, row: usize, alpha: T, v: &[T]);
    /// `acc += alpha * row`
    fn accumulate(&mut self, row: usize, alpha: T, acc: &mut [T]);
    /// `acc += alpha * row`, then `row += alpha * v`.
    fn accumulate_then_add(&mut self, row: usize, alpha: T, v: &[T], acc: &mut [T]) {
        self.accumulate(row, alpha, acc);
        self.add(row, alpha, v);
    }
}

/// Dot product over eight independent partial sums, which lets the compiler
/// vectorize the reduction.
#[inline]
fn dot_lanes<T: Float>(a: &[T], b: &[T]) -> T {
    let mut lanes = [T::zero(); 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let mut tail = T::zero();
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail = tail + *x * *y;
    }
    for (x, y) in ca.zip(cb) {
        for i in 0..8 {
            lanes[i] = lanes[i] + x[i] * y[i];
        }
    }
    let quad = [lanes[0] + lanes[4], lanes[1] + lanes[5], lanes[2] + lanes[6], lanes[3] + lanes[7]];
    (quad[0] + quad[2]) + (quad[1] + quad[3]) + tail
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseStore<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Float> DenseStore<T> {
    pub fn new(dim: usize, data: Vec<T>) -> Self {
        debug_assert!(dim == 0 || data.len().is_multiple_of(dim));
        Self { dim, data }
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self::new(dim, alloc::vec![T::zero(); rows * dim])
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn into_inner(self) -> Vec<T> {
        self.data
    }
}

impl<T: Float> VectorStore<T> for DenseStore<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn read(&mut self, row: usize, out: &mut [T]) {
        out.copy_from_slice(self.row(row));
    }

    fn dot(&mut self, row: usize, v: &[T]) -> T {
        dot_lanes(self.row(row), v)
    }

    fn add(&mut self, row: usize, alpha: T, v: &[T]) {
        let dim = self.dim;
        for (x, &y) in self.data[row * dim..(row + 1) * dim].iter_mut().zip(v) {
            *x = *x + alpha * y;
        }
    }

    fn accumulate(&mut self, row: usize, alpha: T, acc: &mut [T]) {
        for (a, &x) in acc.iter_mut().zip(self.row(row)) {
            *a = *a + alpha * x;
        }
    }

    fn accumulate_then_add(&mut self, row: usize, alpha: T, v: &[T], acc: &mut [T]) {
        let dim = self.dim;
        let r = &mut self.data[row * dim..(row + 1) * dim];
        for ((x, a), &y) in r.iter_mut().zip(acc.iter_mut()).zip(v) {
            *a = *a + alpha * *x;
            *x = *x + alpha * y;
        }
    }
}

/// f32 rows shared between workers.
#[derive(Debug)]
pub struct AtomicStore {
    dim: usize,
    data: Vec<AtomicU32>,
}

impl AtomicStore {
    pub fn new(dim: usize, data: Vec<f32>) -> Self {
        Self { dim, data: data.into_iter().map(|x| AtomicU32::new(x.to_bits())).collect() }
    }

    pub fn into_inner(self) -> Vec<f32> {
        self.data.into_iter().map(|x| f32::from_bits(x.into_inner())).collect()
    }

    fn cells(&self, row: usize) -> &[AtomicU32] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }
}

#[inline]
fn load(cell: &AtomicU32) -> f32 {
    f32::from_bits(cell.load(Ordering::Relaxed))
}

impl VectorStore<f32> for &AtomicStore {
    fn dim(&self) -> usize {
        self.dim
    }

    fn read(&mut self, row: usize, out: &mut [f32]) {
        for (o, c) in out.iter_mut().zip(self.cells(row)) {
            *o = load(c);
        }
    }

    fn dot(&mut self, row: usize, v: &[f32]) -> f32 {
        self.cells(row).iter().zip(v).map(|(c, &y)| load(c) * y).sum()
    }

    fn add(&mut self, row: usize, alpha: f32, v: &[f32]) {
        for (c, &y) in self.cells(row).iter().zip(v) {
            c.store((load(c) + alpha * y).to_bits(), Ordering::Relaxed);
        }
    }

    fn accumulate(&mut self, row: usize, alpha: f32, acc: &mut [f32]) {
        for (a, c) in acc.iter_mut().zip(self.cells(row)) {
            *a += alpha * load(c);
        }
    }
}
