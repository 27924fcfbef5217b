//! Skip-gram negative sampling: the shared gradient kernel, the noise
//! distribution, and the learning-rate schedule.

use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng as _;

use super::store::{DenseStore, VectorStore};
use crate::rng::Rng;

/// Exponent applied to unigram counts for the noise distribution.
pub const NOISE_POWER: f64 = 0.75;

/// `-ln σ(x)`, stable for large |x|.
fn neg_log_sigmoid<T: Float>(x: T) -> T {
    if x > T::zero() {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

/// One SGD step on `-ln σ(h·o_target) - Σ ln σ(-h·o_neg)` for the output rows.
///
/// Output rows are updated in place. The gradient step for `hidden` is added
/// to `grad`; the caller applies it to whichever input rows produced `hidden`.
/// Returns the loss at the point before the update, or zero when
/// `track_loss` is off.
pub fn sgns_update<T: Float, O: VectorStore<T>>(
    hidden: &[T],
    outputs: &mut O,
    target: usize,
    negatives: &[usize],
    lr: T,
    grad: &mut [T],
    track_loss: bool,
) -> T {
    let mut loss = T::zero();
    let rows = core::iter::once((target, true)).chain(negatives.iter().map(|&n| (n, false)));
    for (row, positive) in rows {
        let score = outputs.dot(row, hidden);
        // One exponential serves both σ(score) and the loss:
        // -ln σ(m) = max(0, -m) + ln(1 + e^{-|m|}).
        let e = (-score.abs()).exp();
        let p = if score >= T::zero() { T::one() / (T::one() + e) } else { e / (T::one() + e) };
        let (label, margin) = if positive { (T::one(), score) } else { (T::zero(), -score) };
        if track_loss {
            loss = loss + (-margin).max(T::zero()) + e.ln_1p();
        }
        let g = lr * (label - p);
        outputs.accumulate_then_add(row, g, hidden, grad);
    }
    loss
}

/// Loss of a single (center, context) pair against explicit negatives.
pub fn sgns_loss(center: &[f64], context: &[f64], negatives: &[Vec<f64>]) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    neg_log_sigmoid(dot(center, context))
        + negatives.iter().map(|n| neg_log_sigmoid(-dot(center, n))).sum::<f64>()
}

/// One stochastic gradient step on a detached (center, context, negatives)
/// triple. Returns the loss before the update.
pub fn sgns_step(
    center: &mut [f64],
    context: &mut [f64],
    negatives: &mut [Vec<f64>],
    lr: f64,
) -> f64 {
    let dim = center.len();
    debug_assert_eq!(context.len(), dim);
    let mut rows = Vec::with_capacity((1 + negatives.len()) * dim);
    rows.extend_from_slice(context);
    for n in negatives.iter() {
        debug_assert_eq!(n.len(), dim);
        rows.extend_from_slice(n);
    }
    let mut outputs = DenseStore::new(dim, rows);
    let neg_rows: Vec<usize> = (1..=negatives.len()).collect();
    let mut grad = alloc::vec![0.0; dim];
    let loss = sgns_update(center, &mut outputs, 0, &neg_rows, lr, &mut grad, true);

    for (c, g) in center.iter_mut().zip(&grad) {
        *c += g;
    }
    context.copy_from_slice(outputs.row(0));
    for (i, n) in negatives.iter_mut().enumerate() {
        n.copy_from_slice(outputs.row(i + 1));
    }
    loss
}

/// Alias table over `count^0.75`, giving constant-time draws.
#[derive(Debug, Clone)]
pub struct NoiseTable {
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl NoiseTable {
    /// Returns `None` when every count is zero.
    pub fn new(counts: &[u64]) -> Option<Self> {
        let weights: Vec<f64> =
            counts.iter().map(|&c| if c > 0 { libm::pow(c as f64, NOISE_POWER) } else { 0.0 }).collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return None;
        }
        let n = weights.len();
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut prob = alloc::vec![0.0; n];
        let mut alias: Vec<usize> = (0..n).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| scaled[i] < 1.0);
        while let (Some(s), Some(&l)) = (small.pop(), large.last()) {
            prob[s] = scaled[s];
            alias[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are within rounding of 1; zero-weight slots must still
        // never be drawn.
        let fallback = large.first().copied().unwrap_or_else(|| weights.iter().position(|&w| w > 0.0).unwrap());
        for i in large.into_iter().chain(small) {
            if weights[i] > 0.0 {
                prob[i] = 1.0;
            } else {
                prob[i] = 0.0;
                alias[i] = fallback;
            }
        }
        Some(Self { prob, alias })
    }

    pub fn sample(&self, rng: &mut Rng) -> usize {
        let i = rng.random_range(0..self.prob.len());
        if rng.random::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i]
        }
    }

    /// Fills `out` with draws, skipping `exclude`.
    pub fn fill(&self, rng: &mut Rng, exclude: usize, out: &mut Vec<usize>, n: usize) {
        out.clear();
        let mut attempts = 0;
        while out.len() < n && attempts < 8 * n + 8 {
            let s = self.sample(rng);
            attempts += 1;
            if s != exclude {
                out.push(s);
            }
        }
    }
}

/// Linear decay from `initial` to `initial / 100` over `total` units of work.
#[derive(Debug, Clone, Copy)]
pub struct LrSchedule {
    pub initial: f64,
    pub total: u64,
}

impl LrSchedule {
    pub const FLOOR: f64 = 0.01;

    pub fn at(&self, done: u64) -> f64 {
        let progress = if self.total == 0 { 0.0 } else { done as f64 / self.total as f64 };
        self.initial * (1.0 - (1.0 - Self::FLOOR) * progress.min(1.0))
    }
}
