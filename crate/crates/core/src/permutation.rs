//! Permutations stored as index vectors.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// The permutation matrix `P = I[:, J]` stored as the index vector `J`.
///
/// `A·P` gathers columns (`(A·P)[:, k] = A[:, J[k]]`) and `Pᵀ·A` gathers
/// rows (`(Pᵀ·A)[k, :] = A[J[k], :]`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    indices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Rows,
    Cols,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { indices: (0..n).collect() }
    }

    /// Validates that `indices` is a permutation of `0..n`.
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let n = indices.len();
        let mut seen = vec![false; n];
        for &i in &indices {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation);
            }
            seen[i] = true;
        }
        Ok(Permutation { indices })
    }

    /// Reads the index vector off the columns of a 0/1 matrix.
    pub fn from_matrix(p: &Matrix) -> Result<Self> {
        if !p.is_square() {
            return Err(Error::InvalidPermutation);
        }
        let n = p.rows();
        let mut idx = Vec::with_capacity(n);
        for k in 0..n {
            let col = p.col(k);
            let ones: Vec<usize> = (0..n).filter(|&i| col[i] == 1.0).collect();
            if ones.len() != 1 || col.iter().any(|&x| x != 0.0 && x != 1.0) {
                return Err(Error::InvalidPermutation);
            }
            idx.push(ones[0]);
        }
        Permutation::new(idx)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn is_identity(&self) -> bool {
        self.indices.iter().enumerate().all(|(k, &i)| k == i)
    }

    /// Swaps positions `a` and `b` of the index vector, i.e. right-multiplies
    /// by a transposition.
    pub fn swap(&mut self, a: usize, b: usize) {
        self.indices.swap(a, b);
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (k, &i) in self.indices.iter().enumerate() {
            inv[i] = k;
        }
        Permutation { indices: inv }
    }

    /// The product `self · other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation { indices: other.indices.iter().map(|&k| self.indices[k]).collect() }
    }

    /// Embeds `self` acting on positions `offset..offset+len` of an `n`-index
    /// identity.
    pub fn embed(&self, offset: usize, n: usize) -> Permutation {
        let mut idx: Vec<usize> = (0..n).collect();
        for (k, &i) in self.indices.iter().enumerate() {
            idx[offset + k] = offset + i;
        }
        Permutation { indices: idx }
    }

    pub fn to_matrix(&self) -> Matrix {
        let n = self.len();
        let mut p = Matrix::zeros(n, n);
        for (k, &i) in self.indices.iter().enumerate() {
            p[(i, k)] = 1.0;
        }
        p
    }

    /// Number of cycles of even length decides the parity; returns ±1.
    pub fn sign(&self) -> f64 {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut transpositions = 0usize;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.indices[k];
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `P·v`.
    pub fn apply_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.len());
        let mut out = vec![0.0; v.len()];
        for (k, &i) in self.indices.iter().enumerate() {
            out[i] = v[k];
        }
        out
    }

    /// `Pᵀ·v`.
    pub fn apply_transpose_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.len());
        self.indices.iter().map(|&i| v[i]).collect()
    }

    /// `Pᵀ·A` (row gather).
    pub fn gather_rows(&self, a: &Matrix) -> Matrix {
        a.select_rows(&self.indices)
    }

    /// `A·P` (column gather).
    pub fn gather_cols(&self, a: &Matrix) -> Matrix {
        a.select_cols(&self.indices)
    }
}

/// `P·A` for `side = Rows`, `A·P` for `side = Cols`.
pub fn permute(a: &Matrix, p: &Permutation, side: Side) -> Result<Matrix> {
    match side {
        Side::Rows => {
            if p.len() != a.rows() {
                return Err(Error::DimensionMismatch(format!(
                    "permutation of length {} on {} rows",
                    p.len(),
                    a.rows()
                )));
            }
            Ok(p.inverse().gather_rows(a))
        }
        Side::Cols => {
            if p.len() != a.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "permutation of length {} on {} columns",
                    p.len(),
                    a.cols()
                )));
            }
            Ok(p.gather_cols(a))
        }
    }
}
