mod common;

use common::{random_matrix, random_orthogonal, rng};
use embridge_core::align::{alignment_objective, alignment_residual, procrustes};
use embridge_core::embedding::EmbeddingMatrix;
use embridge_core::eval::rank_by_cosine;
use embridge_core::{learn_projection, translate_content_to_node, translate_node_to_content, AlignmentDictionary, DenseMatrix};
use rand::Rng;

fn invert_orthogonal(r: &DenseMatrix) -> DenseMatrix {
    r.transpose()
}

#[test]
fn exact_recovery_of_inverse_rotation() {
    let mut g = rng(10);
    for &k in &[2usize, 8, 32] {
        for _ in 0..5 {
            let m = 3 * k;
            let a_s = random_matrix(&mut g, m, k).row_normalize().unwrap();
            let r = random_orthogonal(&mut g, k);
            let b_s = a_s.matmul(&r).unwrap();
            let w = procrustes(&a_s, &b_s).unwrap();
            // b W = a for every row  ⇔  W = R⁻¹
            assert!(w.matrix().max_abs_diff(&invert_orthogonal(&r)) <= 1e-8);
            let bw = b_s.matmul(w.matrix()).unwrap();
            for (a, b) in a_s.iter_rows().zip(bw.iter_rows()) {
                let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                assert!(d <= 1e-6);
            }
            assert!(alignment_residual(&a_s, &b_s, w.matrix()) <= 1e-10 * m as f64);
        }
    }
}

#[test]
fn objective_beats_random_orthogonal_matrices() {
    let mut g = rng(11);
    for k in 2..=4 {
        let a_s = random_matrix(&mut g, 10, k).row_normalize().unwrap();
        let b_s = random_matrix(&mut g, 10, k).row_normalize().unwrap();
        let w = procrustes(&a_s, &b_s).unwrap();
        let best = alignment_objective(&a_s, &b_s, w.matrix());
        for _ in 0..2_000 {
            let q = random_orthogonal(&mut g, k);
            assert!(best + 1e-12 >= alignment_objective(&a_s, &b_s, &q));
        }
    }
}

#[test]
fn distance_and_dot_formulations_agree() {
    let mut g = rng(12);
    for _ in 0..50 {
        let k = g.random_range(2..10);
        let m = g.random_range(1..30);
        let a_s = random_matrix(&mut g, m, k).row_normalize().unwrap();
        let b_s = random_matrix(&mut g, m, k).row_normalize().unwrap();
        let w = random_orthogonal(&mut g, k);
        let lhs = alignment_residual(&a_s, &b_s, &w);
        let rhs = 2.0 * m as f64 - 2.0 * alignment_objective(&a_s, &b_s, &w);
        assert!((lhs - rhs).abs() <= 1e-9);
    }
}

#[test]
fn orthogonality_always_holds() {
    let mut g = rng(13);
    for _ in 0..50 {
        let k = g.random_range(1..20);
        // include dictionaries smaller than k (rank-deficient cross matrix)
        let m = g.random_range(1..3 * k + 2);
        let a_s = random_matrix(&mut g, m, k);
        let b_s = random_matrix(&mut g, m, k);
        let w = procrustes(&a_s, &b_s).unwrap();
        assert!(w.orthogonality_residual() <= 1e-8);
    }
}

fn matrix_to_embeddings(m: &DenseMatrix, prefix: &str) -> EmbeddingMatrix {
    let mut e = EmbeddingMatrix::new(m.cols());
    for (i, row) in m.iter_rows().enumerate() {
        e.push(&format!("{prefix}{i}"), row).unwrap();
    }
    e
}

#[test]
fn learn_projection_normalizes_inputs() {
    let mut g = rng(14);
    let k = 5;
    let a = random_matrix(&mut g, 20, k);
    let r = random_orthogonal(&mut g, k);
    // scale rows of B arbitrarily; the direction is what matters
    let mut b = a.matmul(&r).unwrap();
    for i in 0..20 {
        let s = 0.1 + i as f64;
        b.row_mut(i).iter_mut().for_each(|x| *x *= s);
    }
    let ea = matrix_to_embeddings(&a, "d");
    let eb = matrix_to_embeddings(&b, "d");
    let dict = AlignmentDictionary::new(ea.ids().to_vec()).unwrap();
    let w = learn_projection(&ea, &eb, &dict).unwrap();
    assert!(w.matrix().max_abs_diff(&r.transpose()) <= 1e-8);
}

#[test]
fn translation_preserves_norm_and_round_trips() {
    let mut g = rng(15);
    let k = 16;
    let w = procrustes(&random_matrix(&mut g, 40, k), &random_matrix(&mut g, 40, k)).unwrap();
    for _ in 0..20 {
        let mut b: Vec<f64> = (0..k).map(|_| g.random_range(-1.0..1.0)).collect();
        let n = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        b.iter_mut().for_each(|x| *x /= n);
        let a = translate_content_to_node(&b, &w).unwrap();
        assert!((a.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs() <= 1e-8);
        let back = translate_node_to_content(&a, &w).unwrap();
        assert!(back.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-8));
    }
}

#[test]
fn ranking_invariant_under_global_scaling() {
    let mut g = rng(16);
    let nodes = matrix_to_embeddings(&random_matrix(&mut g, 30, 6), "n");
    let query: Vec<f64> = (0..6).map(|_| g.random_range(-1.0..1.0)).collect();
    let base = rank_by_cosine(&query, &nodes, None).unwrap();
    for s in [1e-3, 0.5, 7.0, 1e4] {
        assert_eq!(rank_by_cosine(&query, &nodes.scaled(s), None).unwrap(), base);
    }
}
