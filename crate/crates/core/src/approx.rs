//! Least squares, projection matrices and principal component analysis.

use crate::eigen::spectral;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, Shape};
use crate::qr::householder_qr;
use crate::svd::{leading_sign, svd};
use crate::tolerance::Tolerance;
use crate::triangular::{backward_substitution, forward_substitution, Diagonal};
use crate::utv::{utv, UtvKind};

fn check_rhs(a: &Matrix, b: &[f64]) -> Result<()> {
    a.check_finite()?;
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!("A is {}x{}, b has {}", a.rows(), a.cols(), b.len())));
    }
    if let Some(i) = b.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { row: i, col: 0 });
    }
    Ok(())
}

/// Householder QR with a full-column-rank check on the diagonal of `R`.
fn full_rank_qr(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::RankDeficient { rank: m, expected: n });
    }
    let f = householder_qr(a);
    let r = f.r.submatrix(0, n, 0, n);
    let scale = r.diag().iter().fold(0.0f64, |s, x| s.max(x.abs()));
    let cutoff = Tolerance::default().rank_cutoff(m, n, scale);
    let rank = r.diag().iter().filter(|x| x.abs() > cutoff).count();
    if rank < n || scale == 0.0 {
        return Err(Error::RankDeficient { rank, expected: n });
    }
    Ok((f.q.submatrix(0, m, 0, n), r))
}

/// `x = R⁻¹·Q₁ᵀ·b` for `A` of full column rank. Rank-deficient input is
/// rejected; use [`lstsq_utv`] or [`lstsq_svd`] there.
pub fn lstsq_qr(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    check_rhs(a, b)?;
    let (q1, r) = full_rank_qr(a)?;
    backward_substitution(&r, &q1.t_mul_vec(b), Diagonal::Stored)
}

/// Minimal-norm solution from ULV: `x = V_rᵀ·T₁₁⁻¹·U_rᵀ·b`.
pub fn lstsq_utv(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    check_rhs(a, b)?;
    let f = utv(a, UtvKind::Ulv)?;
    if f.rank == 0 {
        return Ok(vec![0.0; a.cols()]);
    }
    let c = f.u_r().t_mul_vec(b);
    let y = forward_substitution(&f.t11(), &c, Diagonal::Stored)?;
    Ok(f.v_r().t_mul_vec(&y))
}

/// Minimal-norm solution `Σ (uᵢᵀb/σᵢ)·vᵢ` over the numerical rank.
pub fn lstsq_svd(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    check_rhs(a, b)?;
    let s = svd(a, Shape::Reduced)?;
    let n = a.cols();
    let mut x = vec![0.0; n];
    for i in 0..s.rank {
        let coef = s.u.col(i).iter().zip(b).map(|(u, b)| u * b).sum::<f64>() / s.sigma[i];
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += coef * s.v[(j, i)];
        }
    }
    Ok(x)
}

/// Orthogonal projector `A(AᵀA)⁻¹Aᵀ` onto `C(A)`, formed as `Q₁Q₁ᵀ`.
pub fn hat_matrix(a: &Matrix) -> Result<Matrix> {
    a.check_finite()?;
    let (q1, _) = full_rank_qr(a)?;
    Ok(q1.mul_t(&q1).symmetrize())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcaMode {
    /// Eigenvectors of the `p × p` sample covariance.
    Covariance,
    /// Right singular vectors of the centered data.
    Svd,
    /// Eigenvectors of the `n × n` Gram matrix, mapped back through `Xᵀ`.
    HighDim,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    /// `p × m`, orthonormal columns, leading entry of each made positive.
    pub axes: Matrix,
    /// `n × m` projections of the centered data.
    pub components: Matrix,
    /// Variance along each axis, divisor `n − 1`.
    pub explained: Vec<f64>,
    pub mean: Vec<f64>,
    pub total_variance: f64,
}

impl Pca {
    pub fn explained_ratio(&self) -> Vec<f64> {
        if self.total_variance == 0.0 {
            return vec![0.0; self.explained.len()];
        }
        self.explained.iter().map(|l| l / self.total_variance).collect()
    }
}

/// Column means and the centered copy of `x`.
pub fn center(x: &Matrix) -> (Vec<f64>, Matrix) {
    let (n, p) = x.shape();
    let mean: Vec<f64> = (0..p).map(|j| (0..n).map(|i| x[(i, j)]).sum::<f64>() / n.max(1) as f64).collect();
    (mean.clone(), Matrix::from_fn(n, p, |i, j| x[(i, j)] - mean[j]))
}

/// Principal components of the rows of `x` (`n` samples × `p` features).
pub fn pca(x: &Matrix, m: usize, mode: PcaMode) -> Result<Pca> {
    x.check_finite()?;
    let (n, p) = x.shape();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("pca needs at least 2 samples, got {n}")));
    }
    if m == 0 || m > n.min(p) {
        return Err(Error::InvalidArgument(format!("m={m} outside 1..={}", n.min(p))));
    }
    let (mean, xc) = center(x);
    let dof = (n - 1) as f64;
    let total_variance = xc.frobenius().powi(2) / dof;
    let (mut axes, explained) = match mode {
        PcaMode::Covariance => {
            let s = spectral(&xc.t_mul(&xc).scale(1.0 / dof).symmetrize())?;
            (s.q.submatrix(0, p, 0, m), s.lambda[..m].to_vec())
        }
        PcaMode::Svd => {
            let s = svd(&xc, Shape::Reduced)?;
            let lambda = s.sigma[..m].iter().map(|s| s * s / dof).collect();
            (s.v.submatrix(0, p, 0, m), lambda)
        }
        PcaMode::HighDim => {
            let s = spectral(&xc.mul_t(&xc).scale(1.0 / dof).symmetrize())?;
            let mut axes = Matrix::zeros(p, m);
            let floor = Tolerance::default().rank_cutoff(n, p, xc.frobenius());
            for k in 0..m {
                let w = xc.t_mul_vec(&s.q.col(k));
                let nw = crate::matrix::norm2(&w);
                if nw <= floor {
                    return Err(Error::RankDeficient { rank: k, expected: m });
                }
                axes.set_col(k, &w.iter().map(|x| x / nw).collect::<Vec<_>>());
            }
            (axes, s.lambda[..m].to_vec())
        }
    };
    for k in 0..m {
        let col = axes.col(k);
        if leading_sign(&col) < 0.0 {
            axes.set_col(k, &col.iter().map(|x| -x).collect::<Vec<_>>());
        }
    }
    let components = &xc * &axes;
    Ok(Pca { axes, components, explained, mean, total_variance })
}
