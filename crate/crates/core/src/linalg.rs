//! Dense row-major matrices and a one-sided Jacobi SVD for square inputs.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Stacks equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: f64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        // chunks_exact(0) panics, so special-case zero-width matrices
        let width = self.cols.max(1);
        self.data.chunks_exact(width).take(if self.cols == 0 { 0 } else { self.rows })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let x = self.data[i * self.cols + k];
                if x == 0.0 {
                    continue;
                }
                axpy(x, other.row(k), out_row);
            }
        }
        Ok(out)
    }

    /// `selfᵀ · other` without materializing the transpose.
    pub fn transpose_matmul(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch {
                expected: format!("{} rows", self.rows),
                found: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.cols, other.cols);
        for r in 0..self.rows {
            let right = other.row(r);
            for (i, &x) in self.row(r).iter().enumerate() {
                if x != 0.0 {
                    axpy(x, right, &mut out.data[i * other.cols..(i + 1) * other.cols]);
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v · self`.
    pub fn left_mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: v.len() });
        }
        let mut out = vec![0.0; self.cols];
        for (k, &x) in v.iter().enumerate() {
            axpy(x, self.row(k), &mut out);
        }
        Ok(out)
    }

    /// Row vector times transpose: `v · selfᵀ`.
    pub fn left_mul_vec_transposed(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok(self.iter_rows().map(|row| dot(row, v)).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| f64::max(m, libm::fabs(a - b)))
    }

    /// `max |selfᵀ self − I|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let gram = self.transpose_matmul(self).expect("same matrix");
        gram.max_abs_diff(&Self::identity(self.cols))
    }

    /// Scales every row to unit Euclidean norm.
    pub fn row_normalize(&self) -> Result<Self> {
        let mut out = self.clone();
        for r in 0..out.rows {
            normalize(out.row_mut(r)).map_err(|_| Error::ZeroRow(r))?;
        }
        Ok(out)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Normalizes in place; fails on a zero vector.
pub fn normalize(v: &mut [f64]) -> Result<()> {
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    v.iter_mut().for_each(|x| *x /= n);
    Ok(())
}

/// `M = U · diag(singular_values) · Vᵀ`, singular values descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.u.rows;
        let mut us = self.u.clone();
        for r in 0..n {
            for (c, s) in self.singular_values.iter().enumerate() {
                us.data[r * n + c] *= s;
            }
        }
        us.matmul(&self.v.transpose()).expect("square factors")
    }
}

pub const SVD_TOLERANCE: f64 = 1e-12;
pub const SVD_MAX_SWEEPS: usize = 30;

/// Full SVD of a square matrix by cyclic one-sided (Hestenes) Jacobi.
///
/// Column pairs of a working copy are rotated until every pair is orthogonal
/// to within [`SVD_TOLERANCE`] relative to their norms. The largest-magnitude
/// entry of each column of `U` is made non-negative (compensated in `V`), so the
/// output is a deterministic function of the input.
pub fn svd_square(m: &DenseMatrix) -> Result<Svd> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch {
            expected: String::from("square matrix"),
            found: format!("{}x{}", m.rows, m.cols),
        });
    }
    if m.data.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = m.rows;
    // Column-major working copies: column j lives at [j*n, (j+1)*n).
    let mut a = m.transpose().data;
    let mut v = DenseMatrix::identity(n).data;

    let mut converged = n < 2;
    let mut residual = 0.0;
    for _ in 0..SVD_MAX_SWEEPS {
        residual = 0.0;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (ap, aq) = column_pair(&mut a, n, p, q);
                let alpha = dot(ap, ap);
                let beta = dot(aq, aq);
                let gamma = dot(ap, aq);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let off = libm::fabs(gamma) / libm::sqrt(alpha * beta);
                residual = f64::max(residual, off);
                if off <= SVD_TOLERANCE {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(ap, aq, c, s);
                let (vp, vq) = column_pair(&mut v, n, p, q);
                rotate(vp, vq, c, s);
            }
        }
        if residual <= SVD_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: SVD_MAX_SWEEPS, residual });
    }

    let norms: Vec<f64> = (0..n).map(|j| norm(&a[j * n..(j + 1) * n])).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let sigma_max = norms.iter().copied().fold(0.0, f64::max);
    let negligible = sigma_max * (n as f64) * f64::EPSILON;

    // Columns of U and V, in sorted order.
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut v_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut singular_values = Vec::with_capacity(n);
    for &j in &order {
        let sigma = norms[j];
        let mut col = if sigma > negligible && sigma > 0.0 {
            let mut c = a[j * n..(j + 1) * n].to_vec();
            c.iter_mut().for_each(|x| *x /= sigma);
            c
        } else {
            complete_basis(&u_cols, n)
        };
        // Re-orthogonalize against earlier columns to clean up rounding.
        for _ in 0..2 {
            for prev in &u_cols {
                let d = dot(prev, &col);
                axpy(-d, prev, &mut col);
            }
        }
        if normalize(&mut col).is_err() {
            col = complete_basis(&u_cols, n);
        }
        let mut vcol = v[j * n..(j + 1) * n].to_vec();
        if let Some(pivot) = largest_magnitude(&col) {
            if col[pivot] < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
                vcol.iter_mut().for_each(|x| *x = -*x);
            }
        }
        singular_values.push(sigma);
        u_cols.push(col);
        v_cols.push(vcol);
    }

    Ok(Svd {
        u: from_columns(&u_cols, n),
        singular_values,
        v: from_columns(&v_cols, n),
    })
}

fn column_pair(data: &mut [f64], n: usize, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let (head, tail) = data.split_at_mut(q * n);
    (&mut head[p * n..(p + 1) * n], &mut tail[..n])
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let (a, b) = (*xi, *yi);
        *xi = c * a - s * b;
        *yi = s * a + c * b;
    }
}

fn largest_magnitude(v: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, x) in v.iter().enumerate() {
        if best.is_none_or(|b| libm::fabs(*x) > libm::fabs(v[b])) {
            best = Some(i);
        }
    }
    best
}

/// A unit vector orthogonal to every vector in `basis`, built from the
/// standard basis.
fn complete_basis(basis: &[Vec<f64>], n: usize) -> Vec<f64> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        for _ in 0..2 {
            for b in basis {
                let d = dot(b, &e);
                axpy(-d, b, &mut e);
            }
        }
        let len = norm(&e);
        if len * len >= 0.5 {
            e.iter_mut().for_each(|x| *x /= len);
            return e;
        }
        if best.as_ref().is_none_or(|(l, _)| len > *l) {
            best = Some((len, e));
        }
    }
    let (len, mut e) = best.expect("n > 0");
    e.iter_mut().for_each(|x| *x /= len);
    e
}

fn from_columns(cols: &[Vec<f64>], n: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, cols.len());
    for (c, col) in cols.iter().enumerate() {
        for (r, &x) in col.iter().take(n).enumerate() {
            m.data[r * cols.len() + c] = x;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_product() {
        let x = mat(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        assert_eq!(x.matmul(&DenseMatrix::identity(3)).unwrap(), x);
    }

    #[test]
    fn column_swap() {
        let x = mat(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let p = mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(x.matmul(&p).unwrap(), mat(&[&[2.0, 1.0], &[4.0, 3.0]]));
    }

    #[test]
    fn shape_errors() {
        let x = DenseMatrix::zeros(2, 3);
        assert!(matches!(x.matmul(&x), Err(Error::ShapeMismatch { .. })));
        assert!(matches!(svd_square(&x), Err(Error::ShapeMismatch { .. })));
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert_eq!(DenseMatrix::new(1, 1, vec![f64::NAN]), Err(Error::NonFinite));
    }

    #[test]
    fn normalize_rows() {
        let x = mat(&[&[3.0, 4.0]]).row_normalize().unwrap();
        assert!((x.get(0, 0) - 0.6).abs() < 1e-15 && (x.get(0, 1) - 0.8).abs() < 1e-15);
        let unit = mat(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(unit.row_normalize().unwrap().max_abs_diff(&unit) <= 1e-12);
        assert_eq!(mat(&[&[1.0, 1.0], &[0.0, 0.0]]).row_normalize(), Err(Error::ZeroRow(1)));
    }

    #[test]
    fn svd_identity() {
        let svd = svd_square(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(svd.singular_values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn svd_absorbs_negative_sign() {
        let m = mat(&[&[3.0, 0.0], &[0.0, -2.0]]);
        let svd = svd_square(&m).unwrap();
        assert_eq!(svd.singular_values, vec![3.0, 2.0]);
        assert!(svd.reconstruct().max_abs_diff(&m) <= 1e-10);
        assert!(svd.u.orthogonality_residual() <= 1e-12);
        assert!(svd.v.orthogonality_residual() <= 1e-12);
    }

    #[test]
    fn svd_zero_and_rank_deficient() {
        let zero = DenseMatrix::zeros(4, 4);
        let svd = svd_square(&zero).unwrap();
        assert!(svd.singular_values.iter().all(|&s| s == 0.0));
        assert!(svd.u.orthogonality_residual() <= 1e-12);

        let rank1 = mat(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0], &[-1.0, -2.0, -3.0]]);
        let svd = svd_square(&rank1).unwrap();
        assert!(svd.reconstruct().max_abs_diff(&rank1) <= 1e-10);
        assert!(svd.u.orthogonality_residual() <= 1e-10);
        assert!(svd.v.orthogonality_residual() <= 1e-10);
        assert!(svd.singular_values[1] < 1e-12);
    }

    #[test]
    fn sign_convention_pins_largest_entry() {
        let m = mat(&[&[0.0, -5.0], &[1.0, 0.0]]);
        let svd = svd_square(&m).unwrap();
        for c in 0..2 {
            let col = [svd.u.get(0, c), svd.u.get(1, c)];
            let pivot = largest_magnitude(&col).unwrap();
            assert!(col[pivot] >= 0.0);
        }
        assert!(svd.reconstruct().max_abs_diff(&m) <= 1e-12);
    }

    #[test]
    fn vector_products() {
        let w = mat(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert_eq!(w.left_mul_vec(&[0.0, 1.0]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(w.left_mul_vec_transposed(&[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
        assert!(w.left_mul_vec(&[1.0]).is_err());
    }
}
