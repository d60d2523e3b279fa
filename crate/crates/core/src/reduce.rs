//! Orthogonal reductions to Hessenberg, tridiagonal and bidiagonal form.

use crate::error::{Error, Result};
use crate::flops::{flops, three_step_switch, FlopOp};
use crate::matrix::Matrix;
use crate::orthogonal::{make_householder, HouseholderReflector};
use crate::qr::{form_q, householder_qr};
use crate::tolerance::Tolerance;

/// `A = Q·H·Qᵀ` with `H` upper Hessenberg.
#[derive(Debug, Clone, PartialEq)]
pub struct HessenbergResult {
    pub q: Matrix,
    pub h: Matrix,
    /// Every subdiagonal entry is above the rank cutoff.
    pub unreduced: bool,
}

impl HessenbergResult {
    pub fn reconstruct(&self) -> Matrix {
        &(&self.q * &self.h) * &self.q.transpose()
    }
}

fn reflector_below(h: &Matrix, k: usize, row0: usize) -> Option<HouseholderReflector> {
    let m = h.rows();
    let x: Vec<f64> = (row0..m).map(|i| h[(i, k)]).collect();
    if x.len() < 2 || x[1..].iter().all(|&v| v == 0.0) {
        return None;
    }
    let (r, _) = make_householder(&x, 0).ok()?;
    Some(r.with_offset(row0))
}

fn is_unreduced(h: &Matrix) -> bool {
    let n = h.rows();
    let cutoff = Tolerance::default().rank_cutoff(n, n, h.max_abs());
    (1..n).all(|i| h[(i, i - 1)].abs() > cutoff)
}

/// Reduction to upper Hessenberg form by `n − 2` reflector stages.
pub fn hessenberg(a: &Matrix) -> Result<HessenbergResult> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    a.check_finite()?;
    let n = a.rows();
    let mut h = a.clone();
    let mut hs = Vec::new();
    for k in 0..n.saturating_sub(2) {
        let Some(refl) = reflector_below(&h, k, k + 1) else {
            continue;
        };
        refl.apply_left(&mut h, k);
        refl.apply_right(&mut h, 0);
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
        hs.push(refl);
    }
    let q = form_q(&hs, n, n);
    let unreduced = is_unreduced(&h);
    Ok(HessenbergResult { q, h, unreduced })
}

/// `A = Q·T·Qᵀ` with `T` symmetric tridiagonal, stored with exact zeros.
pub fn tridiagonalize(a: &Matrix) -> Result<HessenbergResult> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if !a.is_symmetric(Tolerance::default().rel) {
        return Err(Error::NotSymmetric);
    }
    let mut res = hessenberg(&a.symmetrize())?;
    let n = a.rows();
    let t = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            res.h[(i, i)]
        } else if i == j + 1 || j == i + 1 {
            let (lo, hi) = (i.min(j), i.max(j));
            0.5 * (res.h[(hi, lo)] + res.h[(lo, hi)])
        } else {
            0.0
        }
    });
    res.unreduced = is_unreduced(&t);
    res.h = t;
    Ok(res)
}

/// Outcome of comparing two Hessenberg reductions sharing `q[:, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitQReport {
    /// Index of the first (near) zero subdiagonal of the first result, or
    /// `n − 1` when it is unreduced; agreement is checked through it.
    pub k: usize,
    pub columns_agree: bool,
    pub subdiagonals_agree: bool,
    /// When reduced at `k`, whether the second result is reduced there too.
    pub second_reduced_at_k: bool,
}

/// Checks that two Hessenberg decompositions with the same first column of
/// `Q` agree up to column signs and subdiagonal magnitudes.
pub fn implicit_q_check(
    a: &Matrix,
    res1: &HessenbergResult,
    res2: &HessenbergResult,
) -> Result<ImplicitQReport> {
    let n = a.rows();
    let eps = 1e-8;
    if n == 0 {
        return Ok(ImplicitQReport { k: 0, columns_agree: true, subdiagonals_agree: true, second_reduced_at_k: true });
    }
    let q1 = res1.q.col(0);
    let q2 = res2.q.col(0);
    if q1.iter().zip(&q2).any(|(x, y)| (x - y).abs() > eps) {
        return Err(Error::InvalidArgument("first columns of Q differ".into()));
    }
    let cutoff = Tolerance::default().rank_cutoff(n, n, a.max_abs().max(res1.h.max_abs())) * 1e3;
    let k = (1..n).find(|&i| res1.h[(i, i - 1)].abs() <= cutoff).map(|i| i - 1).unwrap_or(n - 1);
    let columns_agree = (0..=k).all(|j| {
        let (u, v) = (res1.q.col(j), res2.q.col(j));
        let plus = u.iter().zip(&v).all(|(x, y)| (x - y).abs() <= eps);
        let minus = u.iter().zip(&v).all(|(x, y)| (x + y).abs() <= eps);
        plus || minus
    });
    let subdiagonals_agree =
        (1..=k).all(|i| (res1.h[(i, i - 1)].abs() - res2.h[(i, i - 1)].abs()).abs() <= eps * (1.0 + a.max_abs()));
    let second_reduced_at_k = k + 1 >= n || res2.h[(k + 1, k)].abs() <= cutoff;
    Ok(ImplicitQReport { k, columns_agree, subdiagonals_agree, second_reduced_at_k })
}

/// `[q, A·q, …, A^{k−1}·q]`.
pub fn krylov(a: &Matrix, q1: &[f64], k: usize) -> Result<Matrix> {
    if !a.is_square() || a.rows() != q1.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix with vector of length {}",
            a.rows(),
            a.cols(),
            q1.len()
        )));
    }
    let n = q1.len();
    let mut out = Matrix::zeros(n, k);
    let mut v = q1.to_vec();
    for j in 0..k {
        out.set_col(j, &v);
        v = a.mul_vec(&v);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BidiagStrategy {
    GolubKahan,
    Lhc,
    ThreeStep,
    /// Cheapest of the three by their flop formulas.
    Auto,
}

/// `A = U·B·Vᵀ` with `B` upper bidiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct BidiagonalResult {
    pub u: Matrix,
    pub b: Matrix,
    pub v: Matrix,
    pub strategy: BidiagStrategy,
    pub flops_est: f64,
}

impl BidiagonalResult {
    pub fn reconstruct(&self) -> Matrix {
        &(&self.u * &self.b) * &self.v.transpose()
    }
}

/// Flop estimate of a strategy on an `m × n` input.
pub fn bidiag_flops(strategy: BidiagStrategy, m: usize, n: usize) -> f64 {
    match resolve(strategy, m, n) {
        BidiagStrategy::GolubKahan => flops(FlopOp::GolubKahan, m, n),
        BidiagStrategy::Lhc => flops(FlopOp::Lhc, m, n),
        _ => {
            if m > n && m < 2 * n {
                flops(FlopOp::ThreeStep, m, n)
            } else {
                flops(FlopOp::Lhc, m, n).min(flops(FlopOp::GolubKahan, m, n))
            }
        }
    }
}

fn resolve(strategy: BidiagStrategy, m: usize, n: usize) -> BidiagStrategy {
    if strategy != BidiagStrategy::Auto {
        return strategy;
    }
    let gk = flops(FlopOp::GolubKahan, m, n);
    let lhc = flops(FlopOp::Lhc, m, n);
    let three = if m > n && m < 2 * n { flops(FlopOp::ThreeStep, m, n) } else { f64::INFINITY };
    if three < gk && three < lhc {
        BidiagStrategy::ThreeStep
    } else if lhc < gk {
        BidiagStrategy::Lhc
    } else {
        BidiagStrategy::GolubKahan
    }
}

/// Golub-Kahan steps `k0..k1` on `w` in place: a left reflector on column
/// `k`, then a right reflector on row `k`.
fn golub_kahan_steps(w: &mut Matrix, acc: &mut Option<(Matrix, Matrix)>, k0: usize, k1: usize) {
    let (m, n) = w.shape();
    for k in k0..k1 {
        if let Some(h) = reflector_below(w, k, k) {
            h.apply_left(w, k);
            if let Some((u, _)) = acc.as_mut() {
                h.apply_right(u, 0);
            }
            for i in k + 1..m {
                w[(i, k)] = 0.0;
            }
        }
        if k + 2 <= n {
            let x: Vec<f64> = (k + 1..n).map(|j| w[(k, j)]).collect();
            if x.len() >= 2 && x[1..].iter().any(|&y| y != 0.0) {
                let (h, _) = make_householder(&x, 0).expect("nonzero row segment");
                let h = h.with_offset(k + 1);
                h.apply_right(w, k);
                if let Some((_, v)) = acc.as_mut() {
                    h.apply_right(v, 0);
                }
                for j in k + 2..n {
                    w[(k, j)] = 0.0;
                }
            }
        }
    }
}

/// QR of the trailing block `w[k.., k..]` followed by Golub-Kahan on its
/// square triangular part.
fn lhc_tail(w: &mut Matrix, acc: &mut Option<(Matrix, Matrix)>, k: usize) {
    let (m, n) = w.shape();
    let tail = w.submatrix(k, m, k, n);
    let f = householder_qr(&tail);
    if let Some((u, _)) = acc.as_mut() {
        // U[:, k..] ← U[:, k..]·Q
        let uk = &u.submatrix(0, m, k, m) * &f.q;
        u.set_submatrix(0, k, &uk);
    }
    w.set_submatrix(k, k, &f.r);
    golub_kahan_steps(w, acc, k, n);
}

/// Bidiagonalization of `A` (`m >= n`) with explicit `U`, `V`.
pub fn bidiagonalize(a: &Matrix, strategy: BidiagStrategy) -> Result<BidiagonalResult> {
    bidiagonalize_with(a, strategy, true)
}

/// As [`bidiagonalize`]; with `accumulate = false` the orthogonal factors
/// are not formed and `u`, `v` are returned empty (`0 × 0`).
pub fn bidiagonalize_with(a: &Matrix, strategy: BidiagStrategy, accumulate: bool) -> Result<BidiagonalResult> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::DimensionMismatch(format!(
            "bidiagonalization needs rows >= cols, got {m}x{n}; transpose first"
        )));
    }
    a.check_finite()?;
    let chosen = resolve(strategy, m, n);
    let mut w = a.clone();
    let mut acc = accumulate.then(|| (Matrix::identity(m), Matrix::identity(n)));
    match chosen {
        BidiagStrategy::GolubKahan => golub_kahan_steps(&mut w, &mut acc, 0, n),
        BidiagStrategy::Lhc => lhc_tail(&mut w, &mut acc, 0),
        _ => {
            let k = three_step_switch(m, n).min(n);
            golub_kahan_steps(&mut w, &mut acc, 0, k);
            if k < n {
                lhc_tail(&mut w, &mut acc, k);
            }
        }
    }
    let b = Matrix::from_fn(m, n, |i, j| if j == i || j == i + 1 { w[(i, j)] } else { 0.0 });
    let (u, v) = acc.unwrap_or_else(|| (Matrix::zeros(0, 0), Matrix::zeros(0, 0)));
    Ok(BidiagonalResult { u, b, v, strategy: chosen, flops_est: bidiag_flops(chosen, m, n) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_symmetric, rng};

    fn is_hessenberg(h: &Matrix) -> bool {
        let n = h.rows();
        (0..n).all(|i| (0..n).all(|j| i < j + 2 || h[(i, j)] == 0.0))
    }

    #[test]
    fn two_by_two_is_untouched() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        let h = hessenberg(&a).unwrap();
        assert_eq!(h.h, a);
        assert_eq!(h.q, Matrix::identity(2));
    }

    #[test]
    fn random_hessenberg() {
        let mut r = rng(1);
        let a = random_matrix(&mut r, 6, 6);
        let h = hessenberg(&a).unwrap();
        assert!(is_hessenberg(&h.h));
        assert!(h.unreduced);
        assert!(h.reconstruct().rel_diff(&a) < 1e-13);
        assert!((h.h.trace() - a.trace()).abs() < 1e-12 * a.frobenius());
    }

    #[test]
    fn symmetric_gives_tridiagonal() {
        let mut r = rng(2);
        let a = random_symmetric(&mut r, 8);
        let h = hessenberg(&a).unwrap();
        for i in 0..8 {
            for j in i + 2..8 {
                assert!(h.h[(i, j)].abs() < 1e-12 * a.frobenius());
            }
        }
        let t = tridiagonalize(&a).unwrap();
        assert!(t.reconstruct().rel_diff(&a) < 1e-13);
        assert!((t.h.trace() - a.trace()).abs() <= 1e-12 * a.frobenius());
        assert!(t.h.is_symmetric(0.0));
        assert!(tridiagonalize(&random_matrix(&mut r, 3, 3)).is_err());
    }

    #[test]
    fn diagonal_tridiagonalizes_to_itself() {
        let d = Matrix::from_diag(&[3.0, -1.0, 2.0]);
        let t = tridiagonalize(&d).unwrap();
        assert_eq!(t.h, d);
    }

    #[test]
    fn gram_of_bidiagonal_is_tridiagonal() {
        let mut r = rng(3);
        let b = bidiagonalize(&random_matrix(&mut r, 6, 5), BidiagStrategy::GolubKahan).unwrap().b;
        let t = tridiagonalize(&b.t_mul(&b)).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if i > j + 1 || j > i + 1 {
                    assert_eq!(t.h[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn implicit_q() {
        let mut r = rng(4);
        let a = random_matrix(&mut r, 5, 5);
        let h = hessenberg(&a).unwrap();
        let rep = implicit_q_check(&a, &h, &h).unwrap();
        assert!(rep.columns_agree && rep.subdiagonals_agree);
        assert_eq!(rep.k, 4);

        // flip signs of later columns: H' = D·H·D, Q' = Q·D
        let d = Matrix::from_diag(&[1.0, -1.0, 1.0, -1.0, -1.0]);
        let flipped = HessenbergResult { q: &h.q * &d, h: &(&d * &h.h) * &d, unreduced: true };
        let rep = implicit_q_check(&a, &h, &flipped).unwrap();
        assert!(rep.columns_agree && rep.subdiagonals_agree);

        // block upper triangular input is reducible
        let mut b = random_matrix(&mut r, 4, 4);
        for i in 2..4 {
            for j in 0..2 {
                b[(i, j)] = 0.0;
            }
        }
        let hb = hessenberg(&b).unwrap();
        assert!(!hb.unreduced);
        let rep = implicit_q_check(&b, &hb, &hb).unwrap();
        assert_eq!(rep.k, 1);
        assert!(rep.second_reduced_at_k);
    }

    #[test]
    fn krylov_examples() {
        let q = [1.0, 2.0, 3.0];
        assert_eq!(krylov(&Matrix::identity(3), &q, 1).unwrap().col(0), q.to_vec());
        let k = krylov(&Matrix::identity(3), &q, 3).unwrap();
        assert!((0..3).all(|j| k.col(j) == q.to_vec()));

        let mut r = rng(5);
        let a = random_matrix(&mut r, 5, 5);
        let h = hessenberg(&a).unwrap();
        let kr = krylov(&a, &h.q.col(0), 5).unwrap();
        let rr = h.q.t_mul(&kr);
        for i in 0..5 {
            for j in 0..i {
                assert!(rr[(i, j)].abs() < 1e-10 * rr.max_abs());
            }
        }
        assert!(rr.diag().iter().all(|d| d.abs() > 1e-10));
    }

    #[test]
    fn bidiagonal_strategies_agree() {
        let mut r = rng(6);
        let a = random_matrix(&mut r, 7, 5);
        let mut diags = Vec::new();
        for s in [BidiagStrategy::GolubKahan, BidiagStrategy::Lhc, BidiagStrategy::ThreeStep] {
            let f = bidiagonalize(&a, s).unwrap();
            assert!(f.reconstruct().rel_diff(&a) < 1e-13, "{s:?}");
            assert!(f.u.orthogonality_defect() < 1e-13 && f.v.orthogonality_defect() < 1e-13);
            let sv = crate::svd::singular_values(&f.b).unwrap();
            diags.push(sv);
        }
        for d in &diags[1..] {
            for (x, y) in d.iter().zip(&diags[0]) {
                assert!((x - y).abs() <= 1e-8 * diags[0][0]);
            }
        }
    }

    #[test]
    fn skip_accumulation() {
        let mut r = rng(7);
        let a = random_matrix(&mut r, 9, 4);
        for s in [BidiagStrategy::GolubKahan, BidiagStrategy::Lhc, BidiagStrategy::ThreeStep] {
            let full = bidiagonalize(&a, s).unwrap();
            let bare = bidiagonalize_with(&a, s, false).unwrap();
            assert_eq!(full.b, bare.b);
            assert!(bare.u.is_empty() && bare.v.is_empty());
        }
    }

    #[test]
    fn already_bidiagonal() {
        let a = Matrix::from_rows(&[[1.0, 2.0, 0.0], [0.0, 3.0, 4.0], [0.0, 0.0, 5.0], [0.0, 0.0, 0.0]]);
        let f = bidiagonalize(&a, BidiagStrategy::GolubKahan).unwrap();
        assert_eq!(f.b.map(f64::abs), a);
    }

    #[test]
    fn cost_model() {
        let f = bidiagonalize(&Matrix::identity(3), BidiagStrategy::GolubKahan).unwrap();
        assert_eq!(f.flops_est, flops(FlopOp::GolubKahan, 3, 3));
        assert!((bidiag_flops(BidiagStrategy::GolubKahan, 100, 50) - 833_333.333_333).abs() < 1e-3);
        assert_eq!(resolve(BidiagStrategy::Auto, 300, 100), BidiagStrategy::Lhc);
        assert_eq!(resolve(BidiagStrategy::Auto, 150, 100), BidiagStrategy::ThreeStep);
        assert_eq!(resolve(BidiagStrategy::Auto, 100, 100), BidiagStrategy::GolubKahan);
    }
}
