//! Real eigenvalue problems: symmetric spectral decomposition, real Schur
//! form, diagonalization and the uses built on them.

use crate::error::{Error, Result};
use crate::lu;
use crate::matrix::{norm2, Matrix};
use crate::orthogonal::GivensRotation;
use crate::reduce::{hessenberg, tridiagonalize};
use crate::svd::{leading_sign, svd, Shape};
use crate::tolerance::Tolerance;

/// `A = Q·diag(λ)·Qᵀ` with `λ` descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectral {
    pub q: Matrix,
    pub lambda: Vec<f64>,
}

impl Spectral {
    pub fn reconstruct(&self) -> Matrix {
        let mut ql = self.q.clone();
        for j in 0..self.lambda.len() {
            for i in 0..ql.rows() {
                ql[(i, j)] *= self.lambda[j];
            }
        }
        ql.mul_t(&self.q)
    }
}

fn flip_to_leading_positive(q: &mut Matrix) {
    for j in 0..q.cols() {
        if leading_sign(&q.col(j)) < 0.0 {
            for i in 0..q.rows() {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
}

/// Symmetric eigendecomposition: tridiagonalization, then implicit QR
/// sweeps with Wilkinson shifts.
pub fn spectral(a: &Matrix) -> Result<Spectral> {
    a.check_finite()?;
    let tri = tridiagonalize(a)?;
    let n = a.rows();
    let mut t = tri.h;
    let mut q = tri.q;
    let budget = 30 * n.max(1);
    let mut iterations = 0;
    let mut hi = n.saturating_sub(1);
    while hi > 0 {
        for i in 0..hi {
            if t[(i + 1, i)].abs() <= f64::EPSILON * (t[(i, i)].abs() + t[(i + 1, i + 1)].abs()) {
                t[(i + 1, i)] = 0.0;
                t[(i, i + 1)] = 0.0;
            }
        }
        while hi > 0 && t[(hi, hi - 1)] == 0.0 {
            hi -= 1;
        }
        if hi == 0 {
            break;
        }
        let mut lo = hi - 1;
        while lo > 0 && t[(lo, lo - 1)] != 0.0 {
            lo -= 1;
        }
        iterations += 1;
        if iterations > budget {
            return Err(Error::NoConvergence { iterations });
        }
        let e = t[(hi, hi - 1)];
        let dd = 0.5 * (t[(hi - 1, hi - 1)] - t[(hi, hi)]);
        let sgn = if dd >= 0.0 { 1.0 } else { -1.0 };
        let mu = t[(hi, hi)] - e * e / (dd + sgn * dd.hypot(e));
        let mut x = t[(lo, lo)] - mu;
        let mut z = t[(lo + 1, lo)];
        for k in lo..hi {
            let (g, _, _) = GivensRotation::zeroing(k, k + 1, x, z);
            let c0 = if k > lo { k - 1 } else { lo };
            let c1 = (k + 3).min(hi + 1);
            for j in c0..c1 {
                let (p, r) = g.apply_pair(t[(k, j)], t[(k + 1, j)]);
                t[(k, j)] = p;
                t[(k + 1, j)] = r;
            }
            for i in c0..c1 {
                let (p, r) = g.apply_pair(t[(i, k)], t[(i, k + 1)]);
                t[(i, k)] = p;
                t[(i, k + 1)] = r;
            }
            if k > lo {
                t[(k + 1, k - 1)] = 0.0;
                t[(k - 1, k + 1)] = 0.0;
            }
            g.apply_right_transpose(&mut q);
            if k + 1 < hi {
                x = t[(k + 1, k)];
                z = t[(k + 2, k)];
            }
        }
    }
    let d = t.diag();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let mut q = q.select_cols(&order);
    flip_to_leading_positive(&mut q);
    Ok(Spectral { q, lambda: order.iter().map(|&i| d[i]).collect() })
}

/// Real Schur form `A = Q·U·Qᵀ` with `U` upper triangular and its diagonal
/// descending. Complex eigenvalues are reported, not represented.
#[derive(Debug, Clone, PartialEq)]
pub struct Schur {
    pub q: Matrix,
    pub u: Matrix,
}

impl Schur {
    pub fn reconstruct(&self) -> Matrix {
        &(&self.q * &self.u) * &self.q.transpose()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.u.diag()
    }
}

/// Similarity `H ← G·H·Gᵀ` by a rotation in the plane `(k, k + 1)`.
fn similarity(h: &mut Matrix, q: &mut Matrix, g: &GivensRotation) {
    g.apply_left(h, 0);
    g.apply_right_transpose(h);
    g.apply_right_transpose(q);
}

/// Real roots of the characteristic polynomial of a 2×2 block.
fn block_eigenvalues(a: f64, b: f64, c: f64, d: f64) -> Option<(f64, f64)> {
    let half_tr = 0.5 * (a + d);
    let disc = 0.25 * (a - d) * (a - d) + b * c;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    Some((half_tr + s, half_tr - s))
}

pub fn schur(a: &Matrix) -> Result<Schur> {
    a.check_finite()?;
    let hr = hessenberg(a)?;
    let n = a.rows();
    let mut h = hr.h;
    let mut q = hr.q;
    let budget = 30 * n.max(1);
    let mut iterations = 0;
    let mut since_deflation = 0;
    let mut hi = n.saturating_sub(1);
    while hi > 0 {
        for i in 1..=hi {
            if h[(i, i - 1)].abs() <= f64::EPSILON * (h[(i, i)].abs() + h[(i - 1, i - 1)].abs()) {
                h[(i, i - 1)] = 0.0;
            }
        }
        if h[(hi, hi - 1)] == 0.0 {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        let mut lo = hi - 1;
        while lo > 0 && h[(lo, lo - 1)] != 0.0 {
            lo -= 1;
        }
        if hi == lo + 1 {
            // split a real 2×2 block directly
            let (p, b, c, d) = (h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            let (l1, l2) = block_eigenvalues(p, b, c, d).ok_or(Error::ComplexEigenvalues)?;
            // eigenvector for the eigenvalue placed first
            let lam = if (l1 - p).abs() >= (l2 - p).abs() { l1 } else { l2 };
            let (x, y) = if b.abs() >= (lam - d).abs() { (b, lam - p) } else { (lam - d, c) };
            let (g, _, _) = GivensRotation::zeroing(lo, hi, x, y);
            similarity(&mut h, &mut q, &g);
            h[(hi, lo)] = 0.0;
            hi = lo;
            since_deflation = 0;
            continue;
        }
        iterations += 1;
        since_deflation += 1;
        if iterations > budget {
            let tail = block_eigenvalues(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
            return Err(if tail.is_none() { Error::ComplexEigenvalues } else { Error::NoConvergence { iterations } });
        }
        let hh = h[(hi, hi)];
        let mu = if since_deflation % 11 == 10 {
            hh + 0.75 * h[(hi, hi - 1)].abs()
        } else {
            match block_eigenvalues(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], hh) {
                Some((l1, l2)) => {
                    if (l1 - hh).abs() <= (l2 - hh).abs() {
                        l1
                    } else {
                        l2
                    }
                }
                None => hh,
            }
        };
        // explicit shifted QR step on the window lo..=hi
        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (g, r, _) = GivensRotation::zeroing(k, k + 1, h[(k, k)], h[(k + 1, k)]);
            g.apply_left(&mut h, k + 1);
            h[(k, k)] = r;
            h[(k + 1, k)] = 0.0;
            rots.push(g);
        }
        for g in &rots {
            g.apply_right_transpose(&mut h);
            g.apply_right_transpose(&mut q);
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
        for i in 0..n {
            for j in 0..i.saturating_sub(1) {
                h[(i, j)] = 0.0;
            }
        }
    }
    // sort the diagonal descending by adjacent swaps
    for pass in 0..n {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1 + pass) {
            let (x, y) = (h[(k, k)], h[(k + 1, k + 1)]);
            if y <= x {
                continue;
            }
            let (g, _, _) = GivensRotation::zeroing(k, k + 1, h[(k, k + 1)], y - x);
            similarity(&mut h, &mut q, &g);
            h[(k + 1, k)] = 0.0;
            swapped = true;
        }
        if !swapped {
            break;
        }
    }
    Ok(Schur { q, u: h.upper_triangle() })
}

/// `A = X·diag(λ)·X⁻¹` with unit eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Evd {
    pub x: Matrix,
    pub lambda: Vec<f64>,
    /// 2-norm condition number of `X`.
    pub cond: f64,
}

impl Evd {
    pub fn reconstruct(&self) -> Result<Matrix> {
        let mut xl = self.x.clone();
        for j in 0..self.lambda.len() {
            for i in 0..xl.rows() {
                xl[(i, j)] *= self.lambda[j];
            }
        }
        Ok(&xl * &lu::inverse(&self.x)?)
    }
}

/// Diagonalization through the Schur form, back-substituting each
/// eigenvector of the triangular factor.
pub fn evd(a: &Matrix) -> Result<Evd> {
    let s = schur(a)?;
    let n = a.rows();
    let u = &s.u;
    let scale = u.max_abs().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON.sqrt() * scale;
    let mut y = Matrix::zeros(n, n);
    for i in 0..n {
        let lam = u[(i, i)];
        let mut col = vec![0.0; n];
        col[i] = 1.0;
        for j in (0..i).rev() {
            let num: f64 = (j + 1..=i).map(|k| u[(j, k)] * col[k]).sum();
            let gap = u[(j, j)] - lam;
            if gap.abs() <= small {
                let ymax = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if num.abs() <= small * ymax {
                    col[j] = 0.0;
                } else {
                    return Err(Error::NotDiagonalizable);
                }
            } else {
                col[j] = -num / gap;
            }
        }
        y.set_col(i, &col);
    }
    let mut x = &s.q * &y;
    for j in 0..n {
        let c = x.col(j);
        let nc = norm2(&c);
        let sg = leading_sign(&c);
        for i in 0..n {
            x[(i, j)] = sg * x[(i, j)] / nc;
        }
    }
    let sv = svd(&x, Shape::Reduced)?;
    if sv.rank < n {
        return Err(Error::NotDiagonalizable);
    }
    let cond = sv.condition_number();
    Ok(Evd { x, lambda: s.eigenvalues(), cond })
}

/// `A^m`: through the eigendecomposition when it exists, by repeated
/// squaring otherwise.
pub fn matrix_power(a: &Matrix, m: u32) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    match evd(a) {
        Ok(e) => {
            let mut xl = e.x.clone();
            for j in 0..e.lambda.len() {
                let p = e.lambda[j].powi(m as i32);
                for i in 0..xl.rows() {
                    xl[(i, j)] *= p;
                }
            }
            Ok(&xl * &lu::inverse(&e.x)?)
        }
        Err(Error::NotDiagonalizable) | Err(Error::ComplexEigenvalues) | Err(Error::Singular) => {
            Ok(power_by_squaring(a, m))
        }
        Err(e) => Err(e),
    }
}

fn power_by_squaring(a: &Matrix, mut m: u32) -> Matrix {
    let mut result = Matrix::identity(a.rows());
    let mut base = a.clone();
    while m > 0 {
        if m & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        m >>= 1;
    }
    result
}

/// `Aⁿ` of a 2×2 matrix from its two eigenvalues, negative `n` included.
pub fn power_2x2(a: &Matrix, n: i64) -> Result<Matrix> {
    if a.shape() != (2, 2) {
        return Err(Error::DimensionMismatch(format!("expected 2x2, got {}x{}", a.rows(), a.cols())));
    }
    let (alpha, beta) =
        block_eigenvalues(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]).ok_or(Error::ComplexEigenvalues)?;
    if n < 0 && (alpha == 0.0 || beta == 0.0) {
        return Err(Error::Singular);
    }
    let i2 = Matrix::identity(2);
    let pw = |x: f64| x.powf(n as f64);
    if (alpha - beta).abs() <= 1e-12 * (alpha.abs() + beta.abs()) {
        // repeated eigenvalue: αⁿ⁻¹·(n·A − (n − 1)·α·I)
        let nf = n as f64;
        let inner = &a.scale(nf) - &i2.scale((nf - 1.0) * alpha);
        return Ok(inner.scale(alpha.powf(nf - 1.0)));
    }
    let pa = (a - &i2.scale(beta)).scale(pw(alpha) / (alpha - beta));
    let pb = (a - &i2.scale(alpha)).scale(pw(beta) / (beta - alpha));
    Ok(&pa + &pb)
}

/// `A = Σ λᵢ·Eᵢ` with `Eᵢ = xᵢ·yᵢᵀ` (rows `yᵢ` of `X⁻¹`). With `merge`,
/// equal eigenvalues share one summed projector.
pub fn spectral_idempotent_form(a: &Matrix, merge: bool) -> Result<Vec<(f64, Matrix)>> {
    let (x, y, lambda) = if a.is_symmetric(Tolerance::default().rel) {
        let s = spectral(a)?;
        let y = s.q.transpose();
        (s.q, y, s.lambda)
    } else {
        let e = evd(a)?;
        let y = lu::inverse(&e.x)?;
        (e.x, y, e.lambda)
    };
    let n = lambda.len();
    let scale = lambda.iter().fold(0.0f64, |m, l| m.max(l.abs())).max(1.0);
    let mut terms: Vec<(f64, Matrix)> = Vec::new();
    for i in 0..n {
        let e = crate::matrix::outer(&x.col(i), y.row(i));
        if merge {
            if let Some(t) = terms.iter_mut().find(|(l, _)| (l - lambda[i]).abs() <= 1e-9 * scale) {
                t.1 = &t.1 + &e;
                continue;
            }
        }
        terms.push((lambda[i], e));
    }
    Ok(terms)
}

/// `A = Z·D·Zᵀ` for skew-symmetric `A`, with `D` a direct sum of
/// `[[0, 1], [−1, 0]]` blocks followed by zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewBlocks {
    pub z: Matrix,
    pub d: Matrix,
    pub rank: usize,
}

impl SkewBlocks {
    pub fn reconstruct(&self) -> Matrix {
        &(&self.z * &self.d) * &self.z.transpose()
    }
}

/// Congruence elimination with largest-entry pivoting: `E·A·Eᵀ = D`,
/// `Z = E⁻¹`.
pub fn block_diagonalize_skew(a: &Matrix) -> Result<SkewBlocks> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    a.check_finite()?;
    let n = a.rows();
    if (a + &a.transpose()).frobenius() > Tolerance::default().rel * a.frobenius() {
        return Err(Error::NotSkewSymmetric);
    }
    let mut w = a.clone();
    let mut e = Matrix::identity(n);
    let cutoff = Tolerance::default().rank_cutoff(n, n, a.max_abs());
    let mut p = 0;
    while p + 1 < n {
        let mut best = (0.0, p, p + 1);
        for i in p..n {
            for j in i + 1..n {
                if w[(i, j)].abs() > best.0 {
                    best = (w[(i, j)].abs(), i, j);
                }
            }
        }
        let (val, i, j) = best;
        if val <= cutoff {
            break;
        }
        // j > i >= p, so moving i to p leaves j in place
        w.swap_rows(i, p);
        w.swap_cols(i, p);
        e.swap_rows(i, p);
        w.swap_rows(j, p + 1);
        w.swap_cols(j, p + 1);
        e.swap_rows(j, p + 1);
        let piv = w[(p, p + 1)];
        for k in 0..n {
            w[(p, k)] /= piv;
        }
        for k in 0..n {
            w[(k, p)] /= piv;
        }
        for k in 0..n {
            e[(p, k)] /= piv;
        }
        for r in p + 2..n {
            let b = w[(p, r)];
            let c = w[(p + 1, r)];
            // row/col r −= b·(p + 1), then += c·p
            for k in 0..n {
                w[(r, k)] += -b * w[(p + 1, k)] + c * w[(p, k)];
                e[(r, k)] += -b * e[(p + 1, k)] + c * e[(p, k)];
            }
            for k in 0..n {
                w[(k, r)] += -b * w[(k, p + 1)] + c * w[(k, p)];
            }
        }
        p += 2;
    }
    let blocks = p / 2;
    let mut d = Matrix::zeros(n, n);
    for b in 0..blocks {
        d[(2 * b, 2 * b + 1)] = 1.0;
        d[(2 * b + 1, 2 * b)] = -1.0;
    }
    let z = lu::inverse(&e)?;
    Ok(SkewBlocks { z, d, rank: 2 * blocks })
}

/// Definiteness, rank and projector tests read off the eigenvalues of a
/// symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCharacterization {
    pub lambda: Vec<f64>,
    pub positive_definite: bool,
    pub positive_semidefinite: bool,
    pub rank: usize,
    /// Every eigenvalue is within `1e-8` of 0 or 1.
    pub projector: bool,
}

pub fn eigen_characterizations(a: &Matrix) -> Result<EigenCharacterization> {
    let s = spectral(a)?;
    let n = a.rows();
    let scale = s.lambda.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let cutoff = Tolerance::default().rank_cutoff(n, n, scale);
    Ok(EigenCharacterization {
        positive_definite: n > 0 && s.lambda.iter().all(|&l| l > cutoff),
        positive_semidefinite: s.lambda.iter().all(|&l| l >= -cutoff),
        rank: s.lambda.iter().filter(|l| l.abs() > cutoff).count(),
        projector: s.lambda.iter().all(|&l| l.abs() <= 1e-8 || (l - 1.0).abs() <= 1e-8),
        lambda: s.lambda,
    })
}
