#![allow(dead_code, clippy::needless_range_loop)]

use embridge_core::{DenseMatrix, DocumentNetwork};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseMatrix::new(rows, cols, data).unwrap()
}

/// Random orthogonal matrix: Gram-Schmidt QR of a random square matrix,
/// with column signs fixed by R's diagonal.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, k: usize) -> DenseMatrix {
    loop {
        let g = random_matrix(rng, k, k);
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut ok = true;
        for c in 0..k {
            let mut v: Vec<f64> = (0..k).map(|r| g.get(r, c)).collect();
            for _ in 0..2 {
                for prev in &q {
                    let d: f64 = prev.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(prev).for_each(|(x, p)| *x -= d * p);
                }
            }
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n < 1e-8 {
                ok = false;
                break;
            }
            v.iter_mut().for_each(|x| *x /= n);
            q.push(v);
        }
        if ok {
            let mut m = DenseMatrix::zeros(k, k);
            for (c, col) in q.iter().enumerate() {
                for r in 0..k {
                    m.set(r, c, col[r]);
                }
            }
            return m;
        }
    }
}

pub fn naive_matmul(x: &DenseMatrix, y: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(x.rows(), y.cols());
    for i in 0..x.rows() {
        for j in 0..y.cols() {
            let mut s = 0.0;
            for k in 0..x.cols() {
                s += x.get(i, k) * y.get(k, j);
            }
            out.set(i, j, s);
        }
    }
    out
}

/// Clustered document network whose vocabulary follows cluster membership.
///
/// Each document links to `out_links` others, staying in its own cluster with
/// probability `p_in`. Its text draws `topical` of every 10 tokens from its
/// cluster's words and the rest from a shared pool.
pub struct ClusteredFixture {
    pub clusters: usize,
    pub per_cluster: usize,
    pub out_links: usize,
    pub p_in: f64,
    pub words_per_cluster: usize,
    pub shared_words: usize,
    pub doc_len: usize,
    pub topical: usize,
    pub seed: u64,
}

impl Default for ClusteredFixture {
    fn default() -> Self {
        Self {
            clusters: 4,
            per_cluster: 30,
            out_links: 3,
            p_in: 0.9,
            words_per_cluster: 40,
            shared_words: 60,
            doc_len: 60,
            topical: 7,
            seed: 11,
        }
    }
}

impl ClusteredFixture {
    pub fn cluster_of(&self, doc: usize) -> usize {
        doc / self.per_cluster
    }

    pub fn build(&self) -> DocumentNetwork {
        let mut rng = rng(self.seed);
        let n = self.clusters * self.per_cluster;
        let mut net = DocumentNetwork::new();
        for i in 0..n {
            net.add_node(&format!("d{i}"));
        }
        for i in 0..n {
            let c = self.cluster_of(i);
            let mut added = 0;
            while added < self.out_links {
                let j = if rng.random::<f64>() < self.p_in {
                    c * self.per_cluster + rng.random_range(0..self.per_cluster)
                } else {
                    rng.random_range(0..n)
                };
                if j != i && net.add_edge(&format!("d{i}"), &format!("d{j}")) {
                    added += 1;
                }
            }
        }
        let content: Vec<(String, Vec<String>)> = (0..n)
            .map(|i| {
                let c = self.cluster_of(i);
                let tokens = (0..self.doc_len)
                    .map(|_| {
                        if rng.random_range(0..10) < self.topical {
                            format!("c{c}w{}", rng.random_range(0..self.words_per_cluster))
                        } else {
                            format!("s{}", rng.random_range(0..self.shared_words))
                        }
                    })
                    .collect();
                (format!("d{i}"), tokens)
            })
            .collect();
        net.attach_content(content);
        net
    }
}

/// Two `size`-cliques joined by a single edge between their first members.
pub fn barbell(size: usize) -> DocumentNetwork {
    let mut net = DocumentNetwork::new();
    for side in 0..2 {
        for i in 0..size {
            for j in i + 1..size {
                net.add_edge(&format!("{side}_{i}"), &format!("{side}_{j}"));
            }
        }
    }
    net.add_edge("0_0", "1_0");
    net
}
