//! QR factorizations: Gram-Schmidt (classical and modified), Householder
//! and Givens, plus column-pivoted, rank-revealing, LQ and updating variants
//! in the submodules.

mod pivoted;
mod update;

pub use pivoted::{
    cpqr, cpqr_with, lq, reveal_rank_one_deficiency, reveal_rank_r_deficiency, two_sided_orthogonal,
    CpqrMode, LqResult, TwoSidedOrthogonal,
};
pub use update::{
    qr_append_column, qr_append_row, qr_delete_column, qr_delete_row, qr_rank_one_change,
};

pub use crate::matrix::Shape;

use crate::error::{Error, Result};
use crate::matrix::{dot, norm2, Matrix};
use crate::orthogonal::{make_householder, GivensRotation, HouseholderReflector};
use crate::permutation::Permutation;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Cgs,
    Mgs,
    Householder,
    Givens,
}

/// `A·P = Q·R`.
#[derive(Debug, Clone, PartialEq)]
pub struct QrResult {
    pub q: Matrix,
    pub r: Matrix,
    pub p: Permutation,
    pub shape: Shape,
    pub method: Method,
}

impl QrResult {
    /// `Q·R·Pᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        self.p.inverse().gather_cols(&(&self.q * &self.r))
    }

    /// Flips signs so that `r_ii >= 0` for every diagonal entry.
    pub fn normalize_signs(mut self) -> Self {
        let k = self.r.rows().min(self.r.cols()).min(self.q.cols());
        for i in 0..k {
            if self.r[(i, i)] < 0.0 {
                self.r.row_mut(i).iter_mut().for_each(|x| *x = -*x);
                for row in 0..self.q.rows() {
                    self.q[(row, i)] = -self.q[(row, i)];
                }
            }
        }
        self
    }
}

/// QR with the given method and shape. Gram-Schmidt methods require
/// `m >= n` and fail with [`Error::DependentColumn`] on a dependent column.
pub fn qr(a: &Matrix, method: Method, shape: Shape) -> Result<QrResult> {
    qr_with(a, method, shape, &Tolerance::default())
}

pub fn qr_with(a: &Matrix, method: Method, shape: Shape, tol: &Tolerance) -> Result<QrResult> {
    a.check_finite()?;
    match method {
        Method::Cgs | Method::Mgs => gram_schmidt(a, method, shape, false, tol),
        Method::Householder => Ok(truncate(householder_qr(a), shape)),
        Method::Givens => Ok(truncate(givens_qr(a), shape)),
    }
}

/// Gram-Schmidt QR that records `r_kk = 0` at dependent columns and fills
/// the corresponding column of `Q` with a deterministic unit vector
/// orthogonal to the previous ones.
pub fn qr_dependent(a: &Matrix, method: Method, shape: Shape) -> Result<QrResult> {
    if !matches!(method, Method::Cgs | Method::Mgs) {
        return Err(Error::InvalidArgument("dependent-column mode is for cgs or mgs".into()));
    }
    a.check_finite()?;
    gram_schmidt(a, method, shape, true, &Tolerance::default())
}

/// Unique QR: Householder followed by sign normalization.
pub fn qr_unique(a: &Matrix, shape: Shape) -> QrResult {
    truncate(householder_qr(a), shape).normalize_signs()
}

fn truncate(res: QrResult, shape: Shape) -> QrResult {
    let (m, n) = (res.q.rows(), res.r.cols());
    if shape == Shape::Full || m <= n {
        return QrResult { shape, ..res };
    }
    QrResult {
        q: res.q.submatrix(0, m, 0, n),
        r: res.r.submatrix(0, n, 0, n),
        shape: Shape::Reduced,
        ..res
    }
}

/// Reflectors that bring `w` to upper-triangular form, applied in place.
/// Columns whose subdiagonal part is already zero get no reflector.
pub(crate) fn householder_triangularize(w: &mut Matrix) -> Vec<HouseholderReflector> {
    let (m, n) = w.shape();
    let mut hs = Vec::new();
    for k in 0..n.min(m.saturating_sub(1)) {
        let x: Vec<f64> = (k..m).map(|i| w[(i, k)]).collect();
        if x[1..].iter().all(|&v| v == 0.0) {
            continue;
        }
        let (h, r) = make_householder(&x, 0).expect("nonzero subcolumn");
        let h = h.with_offset(k);
        h.apply_left(w, k + 1);
        w[(k, k)] = r;
        for i in k + 1..m {
            w[(i, k)] = 0.0;
        }
        hs.push(h);
    }
    hs
}

/// `H₁·H₂⋯H_k` applied to the first `cols` columns of the identity.
pub(crate) fn form_q(hs: &[HouseholderReflector], m: usize, cols: usize) -> Matrix {
    let mut q = Matrix::from_fn(m, cols, |i, j| if i == j { 1.0 } else { 0.0 });
    for h in hs.iter().rev() {
        h.apply_left(&mut q, 0);
    }
    q
}

/// Full Householder QR of any `m × n` matrix: `Q` is `m × m`, `R` is `m × n`.
pub fn householder_qr(a: &Matrix) -> QrResult {
    let mut w = a.clone();
    let hs = householder_triangularize(&mut w);
    let m = a.rows();
    QrResult {
        q: form_q(&hs, m, m),
        r: w.upper_triangle(),
        p: Permutation::identity(a.cols()),
        shape: Shape::Full,
        method: Method::Householder,
    }
}

/// Full Givens QR, zeroing each column bottom-up with adjacent-row rotations.
pub fn givens_qr(a: &Matrix) -> QrResult {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut q = Matrix::identity(m);
    for j in 0..n.min(m.saturating_sub(1)) {
        for i in (j + 1..m).rev() {
            if w[(i, j)] == 0.0 {
                continue;
            }
            let (g, r, _) = GivensRotation::zeroing(i - 1, i, w[(i - 1, j)], w[(i, j)]);
            g.apply_left(&mut w, j + 1);
            w[(i - 1, j)] = r;
            w[(i, j)] = 0.0;
            g.apply_right_transpose(&mut q);
        }
    }
    QrResult {
        q,
        r: w.upper_triangle(),
        p: Permutation::identity(n),
        shape: Shape::Full,
        method: Method::Givens,
    }
}

/// Extends orthonormal columns `q` (`m × r`) to an `m × m` orthogonal
/// matrix whose first `r` columns are `q` itself.
pub fn complete_basis(q: &Matrix) -> Matrix {
    let (m, r) = q.shape();
    let mut full = householder_qr(q).q;
    for j in 0..r.min(m) {
        full.set_col(j, &q.col(j));
    }
    full
}

/// Unit vector orthogonal to the columns of `q[:, ..k]`: the projected
/// standard basis vector with the largest residual.
fn orthogonal_filler(q: &Matrix, k: usize) -> Vec<f64> {
    let m = q.rows();
    let mut best = vec![0.0; m];
    let mut best_norm = -1.0;
    for e in 0..m {
        let mut v = vec![0.0; m];
        v[e] = 1.0;
        for _ in 0..2 {
            for i in 0..k {
                let qi = q.col(i);
                let c = dot(&qi, &v);
                crate::matrix::axpy(-c, &qi, &mut v);
            }
        }
        let nv = norm2(&v);
        if nv > best_norm + 1e-12 {
            best_norm = nv;
            best = v;
        }
    }
    best.iter_mut().for_each(|x| *x /= best_norm);
    best
}

fn gram_schmidt(
    a: &Matrix,
    method: Method,
    shape: Shape,
    allow_dependent: bool,
    tol: &Tolerance,
) -> Result<QrResult> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::DimensionMismatch(format!(
            "Gram-Schmidt QR needs rows >= cols, got {m}x{n}"
        )));
    }
    let mut q = Matrix::zeros(m, n);
    let mut r = Matrix::zeros(n, n);
    for k in 0..n {
        let ak = a.col(k);
        let mut v = ak.clone();
        for i in 0..k {
            let qi = q.col(i);
            let rik = match method {
                Method::Cgs => dot(&qi, &ak),
                _ => dot(&qi, &v),
            };
            r[(i, k)] = rik;
            crate::matrix::axpy(-rik, &qi, &mut v);
        }
        let nv = norm2(&v);
        if nv <= tol.rank_cutoff(m, n, norm2(&ak)) {
            if !allow_dependent {
                return Err(Error::DependentColumn { k });
            }
            r[(k, k)] = 0.0;
            q.set_col(k, &orthogonal_filler(&q, k));
        } else {
            r[(k, k)] = nv;
            v.iter_mut().for_each(|x| *x /= nv);
            q.set_col(k, &v);
        }
    }
    let (q, r) = match shape {
        Shape::Reduced => (q, r),
        Shape::Full => (complete_basis(&q), r.vstack(&Matrix::zeros(m - n, n))),
    };
    Ok(QrResult { q, r, p: Permutation::identity(n), shape, method })
}
