use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{check_dim, Result};
// Test builds link std, which makes the inherent float methods visible.
#[allow(unused_imports)]
use num_traits::Float;

pub type C64 = Complex64;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

pub const ZERO: C64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = Complex64 { re: 1.0, im: 0.0 };

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn from_real(rows: usize, cols: usize, vals: &[f64]) -> Self {
        assert_eq!(vals.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| c64(vals[i * cols + j], 0.0))
    }

    /// Matrix with the given vectors as columns.
    pub fn from_columns(rows: usize, cols: &[Vec<C64>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = *e;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: C64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        check_dim(self.rows, other.rows)?;
        check_dim(self.cols, other.cols)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        check_dim(self.rows, other.rows)?;
        check_dim(self.cols, other.cols)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        check_dim(self.cols, other.rows)?;
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        check_dim(self.cols, v.len())?;
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// Kronecker product, `self` on the more significant factor.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (r2, c2) = (other.rows, other.cols);
        Matrix::from_fn(self.rows * r2, self.cols * c2, |r, c| self[(r / r2, c / c2)] * other[(r % r2, c % c2)])
    }

    /// Submatrix with the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |U*U - I|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let g = self.adjoint().matmul(self).expect("square");
        g.sub(&Matrix::identity(self.rows)).expect("same shape").max_abs()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        svd(self).singular_values.first().copied().unwrap_or(0.0)
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Thin singular value decomposition `A = U diag(s) V*` with singular values
/// sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows x k` with orthonormal columns, `k = min(rows, cols)`.
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    /// `cols x k` with orthonormal columns.
    pub v: Matrix,
}

/// One-sided (Hestenes) Jacobi SVD.
/// Plane rotation of columns `p < q`.
fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, cs: f64, sn: f64, phase: C64) {
    let (lo, hi) = cols.split_at_mut(q);
    for (xp, xq) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let (a, b) = (*xp, *xq);
        *xp = a * cs - b * phase.conj() * sn;
        *xq = a * phase * sn + b * cs;
    }
}

pub fn svd(a: &Matrix) -> Svd {
    if a.rows < a.cols {
        let t = svd(&a.adjoint());
        return Svd { u: t.v, singular_values: t.singular_values, v: t.u };
    }
    let (m, n) = (a.rows, a.cols);
    // Work on columns: store column-major copies.
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            e
        })
        .collect();
    let eps = f64::EPSILON;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|x| x.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|x| x.norm_sqr()).sum();
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotation zeroing the (p, q) entry of the Gram matrix.
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut cols, p, q, cs, sn, phase);
                rotate(&mut vcols, p, q, cs, sn, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = cols.iter().enumerate().map(|(j, c)| (norm(c), j)).collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(core::cmp::Ordering::Equal));
    let mut u = Matrix::zeros(m, n);
    let mut v = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    let mut ucols_set: Vec<Vec<C64>> = Vec::with_capacity(n);
    for (k, &(sv, j)) in order.iter().enumerate() {
        s.push(sv);
        for i in 0..n {
            v[(i, k)] = vcols[j][i];
        }
        let ucol: Vec<C64> = if sv > 0.0 && sv > eps * order[0].0 * (m as f64) {
            cols[j].iter().map(|x| x / sv).collect()
        } else {
            Vec::new()
        };
        ucols_set.push(ucol);
    }
    // Columns of U for (numerically) zero singular values are completed to an
    // orthonormal set so that U always has orthonormal columns.
    let mut basis: Vec<Vec<C64>> = Vec::new();
    basis.extend(ucols_set.iter().filter(|c| !c.is_empty()).cloned());
    let mut unit = 0;
    for k in 0..n {
        if ucols_set[k].is_empty() {
            loop {
                let mut e = vec![ZERO; m];
                e[unit % m] = ONE;
                unit += 1;
                if let Some(c) = orthogonalise(&e, &basis) {
                    basis.push(c.clone());
                    ucols_set[k] = c;
                    break;
                }
            }
        }
        for i in 0..m {
            u[(i, k)] = ucols_set[k][i];
        }
    }
    Svd { u, singular_values: s, v }
}

/// Orthogonalise `v` against an orthonormal `basis` (two passes); returns the
/// normalised remainder, or `None` if it is numerically in the span.
fn orthogonalise(v: &[C64], basis: &[Vec<C64>]) -> Option<Vec<C64>> {
    let n0 = norm(v);
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
    }
    let n = norm(&w);
    if n <= 1e-10 * n0.max(1e-300) || n == 0.0 {
        None
    } else {
        Some(w.into_iter().map(|x| x / n).collect())
    }
}

/// Modified Gram–Schmidt with re-orthogonalisation. Vectors whose remainder
/// falls below `tol` (relative to their own norm) are dropped.
pub fn gram_schmidt(vectors: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let n0 = norm(v);
        if n0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let n = norm(&w);
        if n > tol * n0 {
            basis.push(w.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

/// Extend an orthonormal set to an orthonormal basis of `C^dim`.
pub fn complete_basis(partial: &[Vec<C64>], dim: usize) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = partial.to_vec();
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut e = vec![ZERO; dim];
        e[k] = ONE;
        if let Some(c) = orthogonalise(&e, &basis) {
            basis.push(c);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kron_orders_left_factor_most_significant() {
        let z = Matrix::diag(&[ONE, -ONE]);
        let i2 = Matrix::identity(2);
        let a = i2.kron(&z);
        let b = z.kron(&i2);
        let da: Vec<f64> = (0..4).map(|k| a[(k, k)].re).collect();
        let db: Vec<f64> = (0..4).map(|k| b[(k, k)].re).collect();
        assert_eq!(da, alloc::vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(db, alloc::vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn svd_reconstructs_and_orders() {
        let a = Matrix::from_fn(5, 3, |r, c| c64((r * 3 + c) as f64 * 0.3 - 1.0, (r as f64) - (c as f64) * 0.7));
        let s = svd(&a);
        for w in s.singular_values.windows(2) {
            assert!(w[0] >= w[1]);
        }
        let sig = Matrix::diag(&s.singular_values.iter().map(|x| c64(*x, 0.0)).collect::<Vec<_>>());
        let rec = s.u.matmul(&sig).unwrap().matmul(&s.v.adjoint()).unwrap();
        assert!(rec.sub(&a).unwrap().max_abs() < 1e-12);
        assert!(s.u.adjoint().matmul(&s.u).unwrap().sub(&Matrix::identity(3)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn svd_of_rank_deficient_matrix() {
        // Rank one: outer product.
        let a = Matrix::from_fn(4, 4, |r, c| c64((r + 1) as f64, 0.0) * c64(1.0, (c as f64) * 0.5));
        let s = svd(&a);
        assert!(s.singular_values[1] < 1e-12);
        assert!(s.u.adjoint().matmul(&s.u).unwrap().sub(&Matrix::identity(4)).unwrap().max_abs() < 1e-10);
        assert!(approx(a.spectral_norm(), s.singular_values[0], 0.0));
    }

    #[test]
    fn gram_schmidt_drops_colinear() {
        let v1 = alloc::vec![ONE, ONE, ZERO];
        let v2 = alloc::vec![c64(2.0, 0.0), c64(2.0, 0.0), ZERO];
        let v3 = alloc::vec![ZERO, ZERO, c64(0.0, 1.0)];
        assert_eq!(gram_schmidt(&[v1.clone(), v2], 1e-10).len(), 1);
        assert_eq!(gram_schmidt(&[v1, v3], 1e-10).len(), 2);
        assert!(gram_schmidt(&[], 1e-10).is_empty());
    }

    #[test]
    fn complete_basis_is_orthonormal() {
        let v = alloc::vec![c64(0.6, 0.0), c64(0.0, 0.8), ZERO];
        let b = complete_basis(&[v], 3);
        let m = Matrix::from_columns(3, &b);
        assert!(m.unitarity_defect() < 1e-14);
    }
}
