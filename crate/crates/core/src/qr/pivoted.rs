use super::{complete_basis, householder_qr, qr_unique, Method, QrResult, Shape};
use crate::error::{Error, Result};
use crate::matrix::{axpy, dot, norm2, Matrix};
use crate::permutation::Permutation;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpqrMode {
    /// Scan columns left to right, moving dependent ones to the end.
    Simple,
    /// Sort columns by decreasing norm first, then scan.
    Practical,
}

/// Column-pivoted QR: `A·P = Q·[R11 R12; 0 0]` together with the rank.
pub fn cpqr(a: &Matrix, mode: CpqrMode, shape: Shape) -> Result<(QrResult, usize)> {
    cpqr_with(a, mode, shape, &Tolerance::default())
}

pub fn cpqr_with(
    a: &Matrix,
    mode: CpqrMode,
    shape: Shape,
    tol: &Tolerance,
) -> Result<(QrResult, usize)> {
    a.check_finite()?;
    let (m, n) = a.shape();
    let p0 = match mode {
        CpqrMode::Simple => Permutation::identity(n),
        CpqrMode::Practical => {
            let norms: Vec<f64> = (0..n).map(|j| norm2(&a.col(j))).collect();
            let mut idx: Vec<usize> = (0..n).collect();
            // stable sort keeps the original order among equal norms
            idx.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
            Permutation::new(idx).expect("sorted indices")
        }
    };
    let a0 = p0.gather_cols(a);

    // Gram-Schmidt scan with one reorthogonalization pass
    let mut qs: Vec<Vec<f64>> = Vec::new();
    let mut accepted = Vec::new();
    let mut dependent = Vec::new();
    let mut r11_cols: Vec<Vec<f64>> = Vec::new();
    let (mut diag_max, mut diag_min) = (0.0f64, f64::INFINITY);
    for k in 0..n {
        let ak = a0.col(k);
        if qs.len() == m {
            dependent.push(k);
            continue;
        }
        let mut v = ak.clone();
        let mut coeffs = vec![0.0; qs.len()];
        for _ in 0..2 {
            for (i, qi) in qs.iter().enumerate() {
                let c = dot(qi, &v);
                coeffs[i] += c;
                axpy(-c, qi, &mut v);
            }
        }
        let nv = norm2(&v);
        // projection error grows with the conditioning of the accepted basis,
        // estimated by the spread of the R11 diagonal
        let spread = if diag_min > 0.0 { (diag_max / diag_min).max(1.0) } else { 1.0 };
        if nv <= tol.rank_cutoff(m, n, norm2(&ak)) * spread || nv == 0.0 {
            dependent.push(k);
        } else {
            diag_max = diag_max.max(nv);
            diag_min = diag_min.min(nv);
            v.iter_mut().for_each(|x| *x /= nv);
            coeffs.push(nv);
            qs.push(v);
            r11_cols.push(coeffs);
            accepted.push(k);
        }
    }
    let rank = accepted.len();
    let p1 = Permutation::new(accepted.iter().chain(&dependent).copied().collect())
        .expect("accepted and dependent columns partition the range");
    let p = p0.compose(&p1);

    let q_r = Matrix::from_fn(m, rank, |i, j| qs[j][i]);
    let mut r = Matrix::zeros(rank, n);
    for (j, col) in r11_cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            r[(i, j)] = x;
        }
    }
    for (jj, &k) in dependent.iter().enumerate() {
        let proj = q_r.t_mul_vec(&a0.col(k));
        for i in 0..rank {
            r[(i, rank + jj)] = proj[i];
        }
    }
    let (q, r) = match shape {
        Shape::Reduced => (q_r, r),
        Shape::Full => (complete_basis(&q_r), r.vstack(&Matrix::zeros(m - rank, n))),
    };
    Ok((QrResult { q, r, p, shape, method: Method::Mgs }, rank))
}

/// Moves the largest `|v_i|` last and factors `A·P = Q·R`, so that
/// `|r_nn| <= √n·‖A·v‖` for unit `v`.
pub fn reveal_rank_one_deficiency(a: &Matrix, v: &[f64]) -> Result<QrResult> {
    let n = a.cols();
    if v.len() != n {
        return Err(Error::DimensionMismatch(format!("vector of length {} for {n} columns", v.len())));
    }
    if n == 0 {
        return Ok(qr_unique(a, Shape::Reduced));
    }
    let mut best = 0;
    for i in 1..n {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    let mut p = Permutation::identity(n);
    p.swap(best, n - 1);
    let f = qr_unique(&p.gather_cols(a), Shape::Reduced);
    Ok(QrResult { p, ..f })
}

/// Recursively isolates a trailing `r × r` block `N` of `R` with small
/// norm: at step `k` the leading `(n−k) × (n−k)` block is re-factored with
/// its smallest right singular vector moved last.
pub fn reveal_rank_r_deficiency(a: &Matrix, r: usize) -> Result<QrResult> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::DimensionMismatch(format!("need rows >= cols, got {m}x{n}")));
    }
    if r >= n.max(1) && n > 0 {
        return Err(Error::InvalidArgument(format!("deficiency {r} must be below {n}")));
    }
    let f = qr_unique(a, Shape::Reduced);
    let (mut q, mut rr, mut p) = (f.q, f.r, f.p);
    for k in 0..r {
        let b = n - k;
        let lead = rr.submatrix(0, b, 0, b);
        let svd = crate::svd::svd(&lead, Shape::Full)?;
        let v = svd.v.col(b - 1);
        let step = reveal_rank_one_deficiency(&lead, &v)?;

        p = p.compose(&step.p.embed(0, n));
        let mut new_q = q.clone();
        new_q.set_submatrix(0, 0, &(&q.submatrix(0, m, 0, b) * &step.q));
        q = new_q;
        let m_block = rr.submatrix(0, b, b, n);
        rr.set_submatrix(0, 0, &step.r);
        if b < n {
            rr.set_submatrix(0, b, &step.q.t_mul(&m_block));
        }
    }
    Ok(QrResult { q, r: rr, p, shape: Shape::Reduced, method: Method::Householder })
}

/// `B[p, :] = L·Q`, i.e. `Pᵀ·B = L·Q` with `P = I[:, p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LqResult {
    pub l: Matrix,
    pub q: Matrix,
    pub p: Permutation,
    pub rank: usize,
}

impl LqResult {
    pub fn reconstruct(&self) -> Matrix {
        self.p.inverse().gather_rows(&(&self.l * &self.q))
    }
}

/// LQ through the QR of `Bᵀ`; row-pivoted (RPLQ) when `pivoted`.
pub fn lq(b: &Matrix, shape: Shape, pivoted: bool) -> Result<LqResult> {
    b.check_finite()?;
    let bt = b.transpose();
    if pivoted {
        let (f, rank) = cpqr(&bt, CpqrMode::Practical, shape)?;
        Ok(LqResult { l: f.r.transpose(), q: f.q.transpose(), p: f.p, rank })
    } else {
        let f = super::truncate(householder_qr(&bt), shape);
        let rank = b.rows().min(b.cols());
        Ok(LqResult { l: f.r.transpose(), q: f.q.transpose(), p: f.p, rank })
    }
}

/// `A·P·A = Q1·mid·Q2` from a full CPQR `A·P1 = Q1·R` and a full RPLQ
/// `P2ᵀ·A = L·Q2`, with `P = P1·P2ᵀ` and `mid = R·L`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSidedOrthogonal {
    pub q1: Matrix,
    pub mid: Matrix,
    pub q2: Matrix,
    pub p: Permutation,
    pub rank: usize,
}

impl TwoSidedOrthogonal {
    pub fn reconstruct(&self) -> Matrix {
        &(&self.q1 * &self.mid) * &self.q2
    }
}

pub fn two_sided_orthogonal(a: &Matrix) -> Result<TwoSidedOrthogonal> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let (c, rank) = cpqr(a, CpqrMode::Practical, Shape::Full)?;
    let l = lq(a, Shape::Full, true)?;
    let mut mid = &c.r * &l.l;
    let n = a.rows();
    // outside the leading block the product is zero by construction
    for i in 0..n {
        for j in 0..n {
            if i >= rank || j >= rank {
                mid[(i, j)] = 0.0;
            }
        }
    }
    Ok(TwoSidedOrthogonal { q1: c.q, mid, q2: l.q, p: c.p.compose(&l.p.inverse()), rank })
}
