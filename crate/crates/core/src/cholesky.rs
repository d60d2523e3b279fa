//! Cholesky factorizations of symmetric (semi)definite matrices and their
//! low-rank modifications.

use crate::eigen::spectral;
use crate::error::{Error, Result};
use crate::lu;
use crate::matrix::{Matrix, Shape};
use crate::permutation::Permutation;
use crate::qr::lq;
use crate::tolerance::Tolerance;
use crate::triangular::{forward_substitution, Diagonal};

/// `A = Rᵀ·R` with `R` upper triangular and `r_ii > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    pub r: Matrix,
}

impl CholeskyFactor {
    pub fn reconstruct(&self) -> Matrix {
        self.r.t_mul(&self.r)
    }

    pub fn n(&self) -> usize {
        self.r.rows()
    }
}

/// `Pᵀ·A·P = Rᵀ·R` with `R = [R11 R12; 0 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemidefiniteFactor {
    pub p: Permutation,
    pub r11: Matrix,
    pub r12: Matrix,
    pub rank: usize,
}

impl SemidefiniteFactor {
    /// The `rank × n` nonzero rows `[R11 R12]`.
    pub fn r_top(&self) -> Matrix {
        self.r11.hstack(&self.r12)
    }

    pub fn reconstruct(&self) -> Matrix {
        let top = self.r_top();
        let inner = top.t_mul(&top);
        // A = P·(RᵀR)·Pᵀ
        self.p.inverse().gather_rows(&self.p.inverse().gather_cols(&inner))
    }
}

fn symmetric_input(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    a.check_finite()?;
    if !a.is_symmetric(Tolerance::default().rel) {
        return Err(Error::NotSymmetric);
    }
    Ok(a.symmetrize())
}

fn pivot_cutoff(a: &Matrix) -> f64 {
    let n = a.rows();
    let dmax = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
    Tolerance::default().rank_cutoff(n, n, dmax)
}

/// Row-by-row Schur complement recursion.
pub fn cholesky(a: &Matrix) -> Result<CholeskyFactor> {
    let a = symmetric_input(a)?;
    let n = a.rows();
    let cutoff = pivot_cutoff(&a);
    let mut r = Matrix::zeros(n, n);
    for k in 0..n {
        let s: f64 = (0..k).map(|i| r[(i, k)] * r[(i, k)]).sum();
        let pivot = a[(k, k)] - s;
        if pivot <= cutoff {
            return Err(Error::NotPositiveDefinite { step: k });
        }
        let rkk = pivot.sqrt();
        r[(k, k)] = rkk;
        for j in k + 1..n {
            let s: f64 = (0..k).map(|i| r[(i, k)] * r[(i, j)]).sum();
            r[(k, j)] = (a[(k, j)] - s) / rkk;
        }
    }
    Ok(CholeskyFactor { r })
}

/// The same factor from the unpivoted LDU route: `R = D^{1/2}·U`.
pub fn cholesky_via_ldu(a: &Matrix) -> Result<CholeskyFactor> {
    let a = symmetric_input(a)?;
    let f = lu::ldu(&a)?;
    let n = a.rows();
    let mut r = f.u.clone();
    for i in 0..n {
        let d = f.d[i];
        if d <= 0.0 {
            return Err(Error::NotPositiveDefinite { step: i });
        }
        let s = d.sqrt();
        for j in 0..n {
            r[(i, j)] *= s;
        }
    }
    Ok(CholeskyFactor { r })
}

fn leading_minors(a: &Matrix) -> Result<Vec<f64>> {
    (1..=a.rows()).map(|k| lu::det(&a.submatrix(0, k, 0, k))).collect()
}

/// `[√Δ₁, √(Δ₂/Δ₁), …]` from the leading principal minors `Δ_k`.
pub fn cholesky_diagonal_via_minors(a: &Matrix) -> Result<Vec<f64>> {
    let a = symmetric_input(a)?;
    let minors = leading_minors(&a)?;
    let mut prev = 1.0;
    let mut out = Vec::with_capacity(minors.len());
    for (k, &m) in minors.iter().enumerate() {
        if m <= 0.0 {
            return Err(Error::NotPositiveDefinite { step: k });
        }
        out.push((m / prev).sqrt());
        prev = m;
    }
    Ok(out)
}

/// Every leading principal minor is positive, with each ratio
/// `Δ_k / Δ_{k−1}` above the same cutoff `cholesky` applies to its pivots.
pub fn is_pd_sylvester(a: &Matrix) -> Result<bool> {
    let a = symmetric_input(a)?;
    let cutoff = pivot_cutoff(&a);
    let mut prev = 1.0;
    for m in leading_minors(&a)? {
        if m <= 0.0 || m / prev <= cutoff {
            return Ok(false);
        }
        prev = m;
    }
    Ok(true)
}

/// Cholesky with complete diagonal pivoting: the largest remaining diagonal
/// entry is moved to the pivot position at each step.
pub fn semidefinite_rank_revealing(a: &Matrix) -> Result<SemidefiniteFactor> {
    let mut s = symmetric_input(a)?;
    let n = s.rows();
    let cutoff = pivot_cutoff(&s);
    let mut p = Permutation::identity(n);
    let mut r = Matrix::zeros(n, n);
    let mut rank = 0;
    for k in 0..n {
        let (best, dmax) = (k..n).map(|i| (i, s[(i, i)])).fold((k, f64::NEG_INFINITY), |acc, x| {
            if x.1 > acc.1 {
                x
            } else {
                acc
            }
        });
        if dmax <= cutoff {
            if dmax < -cutoff {
                return Err(Error::NegativePivot { step: k });
            }
            break;
        }
        s.swap_rows(k, best);
        s.swap_cols(k, best);
        r.swap_cols(k, best);
        p.swap(k, best);
        let rkk = dmax.sqrt();
        r[(k, k)] = rkk;
        for j in k + 1..n {
            r[(k, j)] = s[(k, j)] / rkk;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                s[(i, j)] -= r[(k, i)] * r[(k, j)];
            }
        }
        rank += 1;
    }
    // a PSD remainder below the cutoff on its diagonal is small everywhere
    let rest = s.submatrix(rank, n, rank, n);
    if rest.max_abs() > 100.0 * cutoff.max(f64::MIN_POSITIVE) {
        return Err(Error::NegativePivot { step: rank });
    }
    Ok(SemidefiniteFactor {
        p,
        r11: r.submatrix(0, rank, 0, rank),
        r12: r.submatrix(0, rank, rank, n),
        rank,
    })
}

fn check_len(f: &CholeskyFactor, v: &[f64]) -> Result<()> {
    if v.len() != f.n() {
        return Err(Error::DimensionMismatch(format!("vector of length {} for order {}", v.len(), f.n())));
    }
    Ok(())
}

/// Factor of `A + v·vᵀ` by a sweep of Givens rotations.
pub fn rank_one_update(f: &CholeskyFactor, v: &[f64]) -> Result<CholeskyFactor> {
    check_len(f, v)?;
    let n = f.n();
    let mut r = f.r.clone();
    let mut w = v.to_vec();
    for k in 0..n {
        if w[k] == 0.0 {
            continue;
        }
        let rkk = r[(k, k)].hypot(w[k]);
        let c = r[(k, k)] / rkk;
        let s = w[k] / rkk;
        r[(k, k)] = rkk;
        for j in k + 1..n {
            let (x, y) = (r[(k, j)], w[j]);
            r[(k, j)] = c * x + s * y;
            w[j] = -s * x + c * y;
        }
        w[k] = 0.0;
    }
    Ok(CholeskyFactor { r })
}

/// Factor of `A − v·vᵀ` by a sweep of hyperbolic rotations.
pub fn rank_one_downdate(f: &CholeskyFactor, v: &[f64]) -> Result<CholeskyFactor> {
    check_len(f, v)?;
    let n = f.n();
    let mut r = f.r.clone();
    let mut w = v.to_vec();
    for k in 0..n {
        if w[k] == 0.0 {
            continue;
        }
        let d = r[(k, k)] * r[(k, k)] - w[k] * w[k];
        if d <= 0.0 {
            return Err(Error::DowndateBreaksPd { step: k });
        }
        let rkk = d.sqrt();
        let c = rkk / r[(k, k)];
        let s = w[k] / r[(k, k)];
        r[(k, k)] = rkk;
        for j in k + 1..n {
            let updated = (r[(k, j)] - s * w[j]) / c;
            w[j] = c * w[j] - s * updated;
            r[(k, j)] = updated;
        }
        w[k] = 0.0;
    }
    Ok(CholeskyFactor { r })
}

/// Factor of `(I + v·uᵀ)·A·(I + u·vᵀ)`: with `z = R⁻ᵀ·v`, `w = R·u` and the
/// LQ factorization `I + z·wᵀ = L·Q`, the new factor is `Lᵀ·R` with row
/// signs fixed so the diagonal is positive.
pub fn rank_two_indefinite_update(f: &CholeskyFactor, u: &[f64], v: &[f64]) -> Result<CholeskyFactor> {
    check_len(f, u)?;
    check_len(f, v)?;
    let n = f.n();
    let z = forward_substitution(&f.r.transpose(), v, Diagonal::Stored)?;
    let w = f.r.mul_vec(u);
    let mut m = crate::matrix::outer(&z, &w);
    for i in 0..n {
        m[(i, i)] += 1.0;
    }
    let l = lq(&m, Shape::Full, false)?.l;
    let mut r = l.t_mul(&f.r).upper_triangle();
    let cutoff = Tolerance::default().rank_cutoff(n, n, f.r.max_abs());
    for i in 0..n {
        if r[(i, i)].abs() <= cutoff {
            return Err(Error::Singular);
        }
        if r[(i, i)] < 0.0 {
            for j in i..n {
                r[(i, j)] = -r[(i, j)];
            }
        }
    }
    Ok(CholeskyFactor { r })
}

/// The unique symmetric positive definite `B` with `B² = A`.
pub fn pd_sqrt(a: &Matrix) -> Result<Matrix> {
    let s = spectral(&symmetric_input(a)?)?;
    let n = a.rows();
    let cutoff = Tolerance::default().rank_cutoff(n, n, s.lambda.first().copied().unwrap_or(0.0));
    if let Some(k) = s.lambda.iter().position(|&l| l <= cutoff) {
        return Err(Error::NotPositiveDefinite { step: k });
    }
    let mut ql = s.q.clone();
    for j in 0..n {
        let root = s.lambda[j].sqrt();
        for i in 0..n {
            ql[(i, j)] *= root;
        }
    }
    Ok(ql.mul_t(&s.q).symmetrize())
}
