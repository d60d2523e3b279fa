//! Singular value decomposition by bidiagonalization and implicit-shift QR.

use crate::error::{Error, Result};
use crate::matrix::{norm2, Matrix};
use crate::qr::householder_qr;
use crate::reduce::{bidiagonalize, BidiagStrategy};
use crate::tolerance::Tolerance;

pub use crate::matrix::Shape;

/// `A = U·diag(σ)·Vᵀ` with `σ` descending.
///
/// `Reduced` keeps `min(m, n)` columns in `U` and `V`; `Full` makes both
/// square. Each column of `U` has its first significant entry positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
    pub shape: Shape,
    pub rank: usize,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Matrix {
        let k = self.sigma.len();
        let mut us = self.u.submatrix(0, self.u.rows(), 0, k);
        for j in 0..k {
            for i in 0..us.rows() {
                us[(i, j)] *= self.sigma[j];
            }
        }
        us.mul_t(&self.v.submatrix(0, self.v.rows(), 0, k))
    }

    /// `‖A‖₂ / σ_min` over the full spectrum; infinite when rank deficient.
    pub fn condition_number(&self) -> f64 {
        match (self.sigma.first(), self.sigma.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
            (Some(_), Some(_)) => f64::INFINITY,
            _ => 1.0,
        }
    }
}

/// Sign that makes the first entry above `1e-8·max|v|` positive.
pub(crate) fn leading_sign(v: &[f64]) -> f64 {
    let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    match v.iter().find(|x| x.abs() > 1e-8 * big) {
        Some(&x) if x < 0.0 => -1.0,
        _ => 1.0,
    }
}

fn rotate_cols(a: &mut Matrix, j: usize, k: usize, c: f64, s: f64, rows: std::ops::Range<usize>) {
    for i in rows {
        let (x, y) = (a[(i, j)], a[(i, k)]);
        a[(i, j)] = c * x + s * y;
        a[(i, k)] = -s * x + c * y;
    }
}

fn rotate_rows(a: &mut Matrix, j: usize, k: usize, c: f64, s: f64, cols: std::ops::Range<usize>) {
    for l in cols {
        let (x, y) = (a[(j, l)], a[(k, l)]);
        a[(j, l)] = c * x + s * y;
        a[(k, l)] = -s * x + c * y;
    }
}

fn rot(y: f64, z: f64) -> (f64, f64, f64) {
    let r = y.hypot(z);
    if r == 0.0 {
        (1.0, 0.0, 0.0)
    } else {
        (y / r, z / r, r)
    }
}

/// Diagonalizes the `n × n` upper bidiagonal `b` in place, accumulating the
/// left rotations into the first `n` columns of `u` and the right ones into
/// `v`.
fn bidiagonal_qr(b: &mut Matrix, u: &mut Matrix, v: &mut Matrix) -> Result<()> {
    let n = b.rows();
    if n < 2 {
        return Ok(());
    }
    let (um, vm) = (u.rows(), v.rows());
    let budget = 75 * n * n.max(10);
    let mut iterations = 0;
    let mut hi = n - 1;
    let scale = b.max_abs();
    let tiny = f64::EPSILON * scale;
    loop {
        for i in 0..n - 1 {
            if b[(i, i + 1)].abs() <= f64::EPSILON * (b[(i, i)].abs() + b[(i + 1, i + 1)].abs())
                || b[(i, i + 1)].abs() <= f64::MIN_POSITIVE
            {
                b[(i, i + 1)] = 0.0;
            }
        }
        while hi > 0 && b[(hi - 1, hi)] == 0.0 {
            hi -= 1;
        }
        if hi == 0 {
            return Ok(());
        }
        let mut lo = hi - 1;
        while lo > 0 && b[(lo - 1, lo)] != 0.0 {
            lo -= 1;
        }
        iterations += 1;
        if iterations > budget {
            return Err(Error::NoConvergence { iterations });
        }

        // a negligible diagonal entry inside the block: chase its row or
        // column superdiagonal to zero instead of taking a QR step
        if let Some(k) = (lo..=hi).find(|&k| b[(k, k)].abs() <= tiny) {
            b[(k, k)] = 0.0;
            if k < hi {
                let mut f = b[(k, k + 1)];
                b[(k, k + 1)] = 0.0;
                for j in k + 1..=hi {
                    let (c, s, r) = rot(b[(j, j)], f);
                    b[(j, j)] = r;
                    if j < hi {
                        let e = b[(j, j + 1)];
                        f = -s * e;
                        b[(j, j + 1)] = c * e;
                    }
                    // rows (j, k): row_j' = c·row_j + s·row_k
                    rotate_cols(u, j, k, c, s, 0..um);
                }
            } else {
                let mut f = b[(k - 1, k)];
                b[(k - 1, k)] = 0.0;
                for j in (lo..k).rev() {
                    let (c, s, r) = rot(b[(j, j)], f);
                    b[(j, j)] = r;
                    if j > lo {
                        let e = b[(j - 1, j)];
                        f = -s * e;
                        b[(j - 1, j)] = c * e;
                    }
                    rotate_cols(v, j, k, c, s, 0..vm);
                }
            }
            continue;
        }

        // Wilkinson shift from the trailing 2×2 of BᵀB
        let d1 = b[(hi - 1, hi - 1)];
        let d2 = b[(hi, hi)];
        let e1 = b[(hi - 1, hi)];
        let e0 = if hi >= lo + 2 { b[(hi - 2, hi - 1)] } else { 0.0 };
        let t11 = d1 * d1 + e0 * e0;
        let t12 = d1 * e1;
        let t22 = d2 * d2 + e1 * e1;
        let delta = 0.5 * (t11 - t22);
        let denom = delta + if delta >= 0.0 { 1.0 } else { -1.0 } * delta.hypot(t12);
        let mu = if denom == 0.0 { t22 } else { t22 - t12 * t12 / denom };

        let mut y = b[(lo, lo)] * b[(lo, lo)] - mu;
        let mut z = b[(lo, lo)] * b[(lo, lo + 1)];
        for k in lo..hi {
            let (c, s, _) = rot(y, z);
            let r0 = if k > lo { k - 1 } else { lo };
            rotate_cols(b, k, k + 1, c, s, r0..(k + 2).min(hi + 1));
            if k > lo {
                b[(k - 1, k + 1)] = 0.0;
            }
            rotate_cols(v, k, k + 1, c, s, 0..vm);
            y = b[(k, k)];
            z = b[(k + 1, k)];
            let (c, s, _) = rot(y, z);
            rotate_rows(b, k, k + 1, c, s, k..(k + 3).min(hi + 1));
            b[(k + 1, k)] = 0.0;
            rotate_cols(u, k, k + 1, c, s, 0..um);
            if k + 1 < hi {
                y = b[(k, k + 1)];
                z = b[(k, k + 2)];
            }
        }
    }
}

fn svd_tall(a: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    let (m, n) = a.shape();
    let bd = bidiagonalize(a, BidiagStrategy::Auto)?;
    let mut b = bd.b.submatrix(0, n, 0, n);
    let mut u = bd.u;
    let mut v = bd.v;
    bidiagonal_qr(&mut b, &mut u, &mut v)?;
    let mut sigma = b.diag();
    for (j, s) in sigma.iter_mut().enumerate() {
        if *s < 0.0 {
            *s = -*s;
            for i in 0..n {
                v[(i, j)] = -v[(i, j)];
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]));
    let mut cols: Vec<usize> = order.clone();
    cols.extend(n..m);
    let u = u.select_cols(&cols);
    let v = v.select_cols(&order);
    let sigma = order.iter().map(|&j| sigma[j]).collect();
    Ok((u, sigma, v))
}

fn fix_signs(u: &mut Matrix, v: &mut Matrix, k: usize) {
    for j in 0..k {
        if leading_sign(&u.col(j)) < 0.0 {
            for i in 0..u.rows() {
                u[(i, j)] = -u[(i, j)];
            }
            for i in 0..v.rows() {
                v[(i, j)] = -v[(i, j)];
            }
        }
    }
}

pub fn svd(a: &Matrix, shape: Shape) -> Result<SvdResult> {
    svd_with(a, shape, &Tolerance::default())
}

pub fn svd_with(a: &Matrix, shape: Shape, tol: &Tolerance) -> Result<SvdResult> {
    a.check_finite()?;
    let (m, n) = a.shape();
    let k = m.min(n);
    let (mut u, sigma, mut v) = if m >= n {
        svd_tall(a)?
    } else {
        let (u, s, v) = svd_tall(&a.transpose())?;
        (v, s, u)
    };
    fix_signs(&mut u, &mut v, k);
    if shape == Shape::Reduced {
        u = u.submatrix(0, m, 0, k);
        v = v.submatrix(0, n, 0, k);
    }
    let cutoff = tol.rank_cutoff(m, n, sigma.first().copied().unwrap_or(0.0));
    let rank = sigma.iter().filter(|&&s| s > cutoff).count();
    Ok(SvdResult { u, sigma, v, shape, rank })
}

/// Singular values in descending order.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    Ok(svd(a, Shape::Reduced)?.sigma)
}

/// SVD through a Householder QR first: `A = Q·R`, `R = Ũ·Σ·Vᵀ`,
/// `U = Q·Ũ`. Requires `m >= n`.
pub fn svd_via_qr(a: &Matrix) -> Result<SvdResult> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::DimensionMismatch(format!("svd via QR needs rows >= cols, got {m}x{n}")));
    }
    let f = householder_qr(a);
    let q = f.q.submatrix(0, m, 0, n);
    let r = f.r.submatrix(0, n, 0, n);
    let inner = svd(&r, Shape::Reduced)?;
    let mut u = &q * &inner.u;
    let mut v = inner.v;
    fix_signs(&mut u, &mut v, n);
    let cutoff = Tolerance::default().rank_cutoff(m, n, inner.sigma.first().copied().unwrap_or(0.0));
    let rank = inner.sigma.iter().filter(|&&s| s > cutoff).count();
    Ok(SvdResult { u, sigma: inner.sigma, v, shape: Shape::Reduced, rank })
}

/// Orthonormal bases of the four fundamental subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct FourSubspaces {
    pub column: Matrix,
    pub left_null: Matrix,
    pub row: Matrix,
    pub null: Matrix,
    pub rank: usize,
}

pub fn four_subspaces(a: &Matrix) -> Result<FourSubspaces> {
    let (m, n) = a.shape();
    let s = svd(a, Shape::Full)?;
    let r = s.rank;
    Ok(FourSubspaces {
        column: s.u.submatrix(0, m, 0, r),
        left_null: s.u.submatrix(0, m, r, m),
        row: s.v.submatrix(0, n, 0, r),
        null: s.v.submatrix(0, n, r, n),
        rank: r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarSide {
    /// `A = Q·S` with `S = V·Σ·Vᵀ`.
    Left,
    /// `A = S·Q` with `S = U·Σ·Uᵀ`.
    Right,
}

/// Orthogonal factor and symmetric positive semidefinite factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Polar {
    pub q: Matrix,
    pub s: Matrix,
    pub side: PolarSide,
}

impl Polar {
    pub fn reconstruct(&self) -> Matrix {
        match self.side {
            PolarSide::Left => &self.q * &self.s,
            PolarSide::Right => &self.s * &self.q,
        }
    }
}

pub fn polar(a: &Matrix, side: PolarSide) -> Result<Polar> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let f = svd(a, Shape::Full)?;
    let q = f.u.mul_t(&f.v);
    let basis = match side {
        PolarSide::Left => &f.v,
        PolarSide::Right => &f.u,
    };
    let mut scaled = basis.clone();
    for j in 0..f.sigma.len() {
        for i in 0..scaled.rows() {
            scaled[(i, j)] *= f.sigma[j];
        }
    }
    let s = scaled.mul_t(basis).symmetrize();
    Ok(Polar { q, s, side })
}

/// Best rank-`k` approximation and its errors.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    pub approx: Matrix,
    pub k: usize,
    /// `σ_{k+1}`.
    pub spectral_error: f64,
    /// `sqrt(σ²_{k+1} + …)`.
    pub frobenius_error: f64,
}

pub fn truncated_svd(a: &Matrix, k: usize) -> Result<TruncatedSvd> {
    let f = svd(a, Shape::Reduced)?;
    if k == 0 || k > f.rank {
        return Err(Error::InvalidArgument(format!("truncation rank {k} outside 1..={}", f.rank)));
    }
    let cut = SvdResult { sigma: f.sigma[..k].to_vec(), ..f.clone() };
    let approx = cut.reconstruct();
    let tail = &f.sigma[k..];
    Ok(TruncatedSvd {
        approx,
        k,
        spectral_error: tail.first().copied().unwrap_or(0.0),
        frobenius_error: norm2(tail),
    })
}

/// Moore-Penrose pseudo-inverse, inverting singular values above the rank
/// cutoff.
pub fn pseudo_inverse(a: &Matrix) -> Result<Matrix> {
    let f = svd(a, Shape::Reduced)?;
    let (m, n) = a.shape();
    let mut vs = Matrix::zeros(n, f.rank);
    for j in 0..f.rank {
        for i in 0..n {
            vs[(i, j)] = f.v[(i, j)] / f.sigma[j];
        }
    }
    Ok(vs.mul_t(&f.u.submatrix(0, m, 0, f.rank)))
}
