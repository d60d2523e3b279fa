//! Givens-based updates of a full QR factorization.

use super::{Method, QrResult, Shape};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::orthogonal::GivensRotation;
use crate::permutation::Permutation;

fn require_full(res: &QrResult) -> Result<(usize, usize)> {
    let (m, n) = res.r.shape();
    if res.q.shape() != (m, m) {
        return Err(Error::InvalidArgument("update needs a full QR (square Q)".into()));
    }
    Ok((m, n))
}

fn rebuild(q: Matrix, r: Matrix) -> QrResult {
    let n = r.cols();
    QrResult { q, r, p: Permutation::identity(n), shape: Shape::Full, method: Method::Givens }
}

/// Zeroes the first subdiagonal of `r` left to right, starting at column
/// `from`, accumulating the rotations into `q`.
fn retriangularize_hessenberg(q: &mut Matrix, r: &mut Matrix, from: usize) {
    let (m, n) = r.shape();
    for j in from..n.min(m.saturating_sub(1)) {
        if r[(j + 1, j)] == 0.0 {
            continue;
        }
        let (g, rr, _) = GivensRotation::zeroing(j, j + 1, r[(j, j)], r[(j + 1, j)]);
        g.apply_left(r, j + 1);
        r[(j, j)] = rr;
        r[(j + 1, j)] = 0.0;
        g.apply_right_transpose(q);
    }
}

/// Full QR of `A + u·vᵀ` from the full QR of `A`.
pub fn qr_rank_one_change(res: &QrResult, u: &[f64], v: &[f64]) -> Result<QrResult> {
    let (m, n) = require_full(res)?;
    if u.len() != m || v.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "update vectors of lengths {}, {} for a {m}x{n} factor",
            u.len(),
            v.len()
        )));
    }
    let mut q = res.q.clone();
    let mut r = res.r.clone();
    let mut w = q.t_mul_vec(u);
    // rotate w to a multiple of e₁ from the bottom; R becomes upper Hessenberg
    for k in (1..m).rev() {
        if w[k] == 0.0 {
            continue;
        }
        let (g, wk, _) = GivensRotation::zeroing(k - 1, k, w[k - 1], w[k]);
        w[k - 1] = wk;
        w[k] = 0.0;
        g.apply_left(&mut r, 0);
        g.apply_right_transpose(&mut q);
    }
    if m > 0 {
        for j in 0..n {
            r[(0, j)] += w[0] * v[j];
        }
    }
    retriangularize_hessenberg(&mut q, &mut r, 0);
    Ok(rebuild(q, r))
}

/// Full QR after removing column `k`.
pub fn qr_delete_column(res: &QrResult, k: usize) -> Result<QrResult> {
    let (_, n) = require_full(res)?;
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, len: n });
    }
    let keep: Vec<usize> = (0..n).filter(|&j| j != k).collect();
    let mut r = res.r.select_cols(&keep);
    let mut q = res.q.clone();
    retriangularize_hessenberg(&mut q, &mut r, k);
    Ok(rebuild(q, r))
}

/// Full QR after inserting column `w` so that it becomes column `k`.
pub fn qr_append_column(res: &QrResult, w: &[f64], k: usize) -> Result<QrResult> {
    let (m, n) = require_full(res)?;
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, len: n + 1 });
    }
    if w.len() != m {
        return Err(Error::DimensionMismatch(format!("column of length {} for {m} rows", w.len())));
    }
    let z = res.q.t_mul_vec(w);
    let mut r = Matrix::zeros(m, n + 1);
    for i in 0..m {
        for j in 0..n + 1 {
            r[(i, j)] = match j.cmp(&k) {
                std::cmp::Ordering::Less => res.r[(i, j)],
                std::cmp::Ordering::Equal => z[i],
                std::cmp::Ordering::Greater => res.r[(i, j - 1)],
            };
        }
    }
    let mut q = res.q.clone();
    for i in (k + 1..m).rev() {
        if r[(i, k)] == 0.0 {
            continue;
        }
        let (g, ri, _) = GivensRotation::zeroing(i - 1, i, r[(i - 1, k)], r[(i, k)]);
        g.apply_left(&mut r, k + 1);
        r[(i - 1, k)] = ri;
        r[(i, k)] = 0.0;
        g.apply_right_transpose(&mut q);
    }
    Ok(rebuild(q, r))
}

/// Full QR after inserting row `w` so that it becomes row `k`.
pub fn qr_append_row(res: &QrResult, w: &[f64], k: usize) -> Result<QrResult> {
    let (m, n) = require_full(res)?;
    if k > m {
        return Err(Error::IndexOutOfRange { index: k, len: m + 1 });
    }
    if w.len() != n {
        return Err(Error::DimensionMismatch(format!("row of length {} for {n} columns", w.len())));
    }
    let mut h = Matrix::zeros(m + 1, n);
    h.set_row(0, w);
    h.set_submatrix(1, 0, &res.r);
    // [wᵀ; A] = diag(1, Q)·H, then move the new row to position k
    let mut q = Matrix::zeros(m + 1, m + 1);
    for i in 0..m + 1 {
        let src = match i.cmp(&k) {
            std::cmp::Ordering::Less => i + 1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => i,
        };
        if src == 0 {
            q[(i, 0)] = 1.0;
        } else {
            for j in 0..m {
                q[(i, j + 1)] = res.q[(src - 1, j)];
            }
        }
    }
    retriangularize_hessenberg(&mut q, &mut h, 0);
    Ok(rebuild(q, h))
}

/// Full QR after removing row `k`; needs `m − 1 >= n`.
pub fn qr_delete_row(res: &QrResult, k: usize) -> Result<QrResult> {
    let (m, n) = require_full(res)?;
    if k >= m {
        return Err(Error::IndexOutOfRange { index: k, len: m });
    }
    if m - 1 < n {
        return Err(Error::DimensionMismatch(format!(
            "deleting a row of a {m}x{n} factor leaves fewer rows than columns"
        )));
    }
    let mut q = res.q.clone();
    let mut r = res.r.clone();
    let mut qk = q.row(k).to_vec();
    for i in (1..m).rev() {
        if qk[i] == 0.0 {
            continue;
        }
        let (g, x, _) = GivensRotation::zeroing(i - 1, i, qk[i - 1], qk[i]);
        qk[i - 1] = x;
        qk[i] = 0.0;
        g.apply_left(&mut r, 0);
        g.apply_right_transpose(&mut q);
    }
    // now Q[k, :] = ±e₁ and Q[:, 0] = ±e_k
    let rows: Vec<usize> = (0..m).filter(|&i| i != k).collect();
    let q_new = q.select_rows(&rows).submatrix(0, m - 1, 1, m);
    let r_new = r.submatrix(1, m, 0, n);
    Ok(rebuild(q_new, r_new))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qr::{householder_qr, qr_unique};
    use crate::random::{random_matrix, random_vector, rng};

    fn check(f: &QrResult, a: &Matrix) {
        assert!(f.reconstruct().rel_diff(a) <= 1e-12, "residual {}", f.reconstruct().rel_diff(a));
        assert!(f.q.orthogonality_defect() <= 1e-12);
        assert!(f.r.is_upper_triangular());
    }

    fn same_up_to_signs(f: &QrResult, a: &Matrix) {
        let g = qr_unique(a, Shape::Full);
        let h = f.clone().normalize_signs();
        let k = a.rows().min(a.cols());
        assert!((&h.r.submatrix(0, k, 0, a.cols()) - &g.r.submatrix(0, k, 0, a.cols())).max_abs() <= 1e-10);
    }

    #[test]
    fn rank_one_change() {
        let mut r = rng(1);
        let a = random_matrix(&mut r, 8, 8);
        let f = householder_qr(&a);
        let g = qr_rank_one_change(&f, &[0.0; 8], &random_vector(&mut r, 8)).unwrap();
        check(&g, &a);

        let u = random_vector(&mut r, 8);
        let v = random_vector(&mut r, 8);
        let b = &a + &crate::matrix::outer(&u, &v);
        let g = qr_rank_one_change(&f, &u, &v).unwrap();
        check(&g, &b);
        same_up_to_signs(&g, &b);
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        let back = qr_rank_one_change(&g, &neg, &v).unwrap();
        assert!(back.reconstruct().rel_diff(&a) <= 1e-9);

        let t = random_matrix(&mut r, 9, 5);
        let f = householder_qr(&t);
        let u = random_vector(&mut r, 9);
        let v = random_vector(&mut r, 5);
        check(&qr_rank_one_change(&f, &u, &v).unwrap(), &(&t + &crate::matrix::outer(&u, &v)));
    }

    #[test]
    fn delete_and_append_column() {
        let mut r = rng(2);
        let a = random_matrix(&mut r, 6, 5);
        let f = householder_qr(&a);
        let last = qr_delete_column(&f, 4).unwrap();
        assert_eq!(last.r, f.r.submatrix(0, 6, 0, 4));
        for k in 0..5 {
            let keep: Vec<usize> = (0..5).filter(|&j| j != k).collect();
            let reduced = a.select_cols(&keep);
            let g = qr_delete_column(&f, k).unwrap();
            check(&g, &reduced);
            same_up_to_signs(&g, &reduced);
            let back = qr_append_column(&g, &a.col(k), k).unwrap();
            check(&back, &a);
            same_up_to_signs(&back, &a);
        }
        assert!(qr_delete_column(&f, 5).is_err());
    }

    #[test]
    fn append_and_delete_row() {
        let mut r = rng(3);
        let a = random_matrix(&mut r, 6, 4);
        let f = householder_qr(&a);
        let w = random_vector(&mut r, 4);
        for k in 0..=6 {
            let mut rows: Vec<Vec<f64>> = (0..6).map(|i| a.row(i).to_vec()).collect();
            rows.insert(k, w.clone());
            let b = Matrix::from_rows(&rows);
            let g = qr_append_row(&f, &w, k).unwrap();
            check(&g, &b);
            same_up_to_signs(&g, &b);
            let back = qr_delete_row(&g, k).unwrap();
            check(&back, &a);
            same_up_to_signs(&back, &a);
        }
        let sq = householder_qr(&random_matrix(&mut r, 3, 3));
        assert!(qr_delete_row(&sq, 0).is_err());
    }
}
