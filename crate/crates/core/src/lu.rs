//! Gaussian elimination: LU with the four pivoting strategies, LDU, block
//! LU, rank-revealing LU, and the solve / determinant / inverse routines
//! built on them.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::permutation::Permutation;
use crate::tolerance::Tolerance;
use crate::triangular::{
    backward_substitution, forward_substitution, lower_inverse, upper_inverse, Diagonal,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pivoting {
    None,
    Partial,
    Complete,
    Rook,
}

/// `Pᵀ·A·Q = L·U` with unit-lower `L` and upper `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct LuResult {
    pub p: Permutation,
    pub q: Permutation,
    pub l: Matrix,
    pub u: Matrix,
    /// `(step, row, col)` of each chosen pivot, in the positions of the
    /// partially eliminated matrix at that step.
    pub pivot_log: Vec<(usize, usize, usize)>,
}

/// `A = L·diag(d)·U` with unit-triangular `L` and `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct LduResult {
    pub l: Matrix,
    pub d: Vec<f64>,
    pub u: Matrix,
}

fn require_square(a: &Matrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare { rows: a.rows(), cols: a.cols() })
    }
}

/// Index of the largest `|x|` among `f(lo..hi)`; ties go to the lowest index.
fn argmax_abs(lo: usize, hi: usize, f: impl Fn(usize) -> f64) -> usize {
    let mut best = lo;
    let mut val = f(lo).abs();
    for i in lo + 1..hi {
        let v = f(i).abs();
        if v > val {
            best = i;
            val = v;
        }
    }
    best
}

fn rook_pivot(w: &Matrix, k: usize) -> (usize, usize) {
    let n = w.rows();
    let mut j = k;
    let mut i = argmax_abs(k, n, |r| w[(r, j)]);
    loop {
        let j2 = argmax_abs(k, n, |c| w[(i, c)]);
        if w[(i, j2)].abs() <= w[(i, j)].abs() {
            return (i, j);
        }
        j = j2;
        let i2 = argmax_abs(k, n, |r| w[(r, j)]);
        if w[(i2, j)].abs() <= w[(i, j)].abs() {
            return (i, j);
        }
        i = i2;
    }
}

fn complete_pivot(w: &Matrix, k: usize) -> (usize, usize) {
    let n = w.rows();
    let (mut bi, mut bj, mut best) = (k, k, w[(k, k)].abs());
    for i in k..n {
        for j in k..n {
            let v = w[(i, j)].abs();
            if v > best {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }
    (bi, bj)
}

/// LU factorization with the default tolerance.
pub fn lu(a: &Matrix, strategy: Pivoting) -> Result<LuResult> {
    lu_with(a, strategy, &Tolerance::default())
}

/// LU factorization.
///
/// Without pivoting a pivot with `|p| <= rank_rel·n·max|A|` is reported as
/// [`Error::ZeroPivot`]. With pivoting, singular inputs complete normally and
/// leave zero pivots on the diagonal of `U`.
pub fn lu_with(a: &Matrix, strategy: Pivoting, tol: &Tolerance) -> Result<LuResult> {
    require_square(a)?;
    a.check_finite()?;
    let n = a.rows();
    let mut w = a.clone();
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut log = Vec::with_capacity(n);
    let cutoff = tol.rank_cutoff(n, n, a.max_abs());

    for k in 0..n {
        let (pi, pj) = match strategy {
            Pivoting::None => (k, k),
            Pivoting::Partial => (argmax_abs(k, n, |r| w[(r, k)]), k),
            Pivoting::Complete => complete_pivot(&w, k),
            Pivoting::Rook => rook_pivot(&w, k),
        };
        log.push((k, pi, pj));
        w.swap_rows(k, pi);
        rows.swap(k, pi);
        w.swap_cols(k, pj);
        cols.swap(k, pj);

        let piv = w[(k, k)];
        if strategy == Pivoting::None && piv.abs() <= cutoff {
            return Err(Error::ZeroPivot { step: k });
        }
        if piv == 0.0 {
            // the pivot is maximal in its column, so the column is already zero
            continue;
        }
        for i in k + 1..n {
            let m = w[(i, k)] / piv;
            w[(i, k)] = m;
            if m == 0.0 {
                continue;
            }
            for j in k + 1..n {
                w[(i, j)] -= m * w[(k, j)];
            }
        }
    }

    let l = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => w[(i, j)],
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Less => 0.0,
    });
    let u = w.upper_triangle();
    Ok(LuResult {
        p: Permutation::new(rows).expect("row swaps form a permutation"),
        q: Permutation::new(cols).expect("column swaps form a permutation"),
        l,
        u,
        pivot_log: log,
    })
}

impl LuResult {
    pub fn n(&self) -> usize {
        self.l.rows()
    }

    /// `P·L·U·Qᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let lu = &self.l * &self.u;
        let plu = self.p.inverse().gather_rows(&lu);
        self.q.inverse().gather_cols(&plu)
    }

    /// Solves `A·x = b`, reusing the factorization.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} system with rhs of length {}",
                self.n(),
                self.n(),
                b.len()
            )));
        }
        let pb = self.p.apply_transpose_vec(b);
        let y = forward_substitution(&self.l, &pb, Diagonal::Unit)?;
        let z = backward_substitution(&self.u, &y, Diagonal::Stored).map_err(|_| Error::Singular)?;
        Ok(self.q.apply_vec(&z))
    }

    /// Solves `A·X = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Result<Matrix> {
        let mut x = Matrix::zeros(self.n(), b.cols());
        for j in 0..b.cols() {
            x.set_col(j, &self.solve(&b.col(j))?);
        }
        Ok(x)
    }

    /// `det(P)·det(Q)·Π u_ii`.
    pub fn det(&self) -> f64 {
        self.p.sign() * self.q.sign() * self.u.diag().iter().product::<f64>()
    }

    /// Number of diagonal entries of `U` above the rank cutoff.
    pub fn rank(&self, scale: f64, tol: &Tolerance) -> usize {
        let n = self.n();
        let cutoff = tol.rank_cutoff(n, n, scale);
        self.u.diag().iter().take_while(|d| d.abs() > cutoff).count()
    }
}

/// Solves `A·x = b` through LU with partial pivoting.
pub fn solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    lu(a, Pivoting::Partial)?.solve(b)
}

/// Determinant via LU with partial pivoting; singular input gives 0.
pub fn det(a: &Matrix) -> Result<f64> {
    Ok(lu(a, Pivoting::Partial)?.det())
}

/// Inverse as `Q·U⁻¹·L⁻¹·Pᵀ` from triangular inverses.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let f = lu(a, Pivoting::Partial)?;
    let n = f.n();
    let cutoff = Tolerance::default().rank_cutoff(n, n, a.max_abs());
    if f.u.diag().iter().any(|d| d.abs() <= cutoff) {
        return Err(Error::Singular);
    }
    let ui = upper_inverse(&f.u, Diagonal::Stored).map_err(|_| Error::Singular)?;
    let li = lower_inverse(&f.l, Diagonal::Unit)?;
    let x = &ui * &li;
    // (U⁻¹L⁻¹)·Pᵀ permutes columns by P, then Q permutes rows
    let x = f.p.inverse().gather_cols(&x);
    Ok(f.q.inverse().gather_rows(&x))
}

/// Unpivoted `A = L·D·U`.
pub fn ldu(a: &Matrix) -> Result<LduResult> {
    let f = lu(a, Pivoting::None)?;
    let d = f.u.diag();
    let u = Matrix::from_fn(f.n(), f.n(), |i, j| f.u[(i, j)] / d[i]);
    Ok(LduResult { l: f.l, d, u })
}

impl LduResult {
    pub fn reconstruct(&self) -> Matrix {
        let mut du = self.u.clone();
        for (i, &di) in self.d.iter().enumerate() {
            du.row_mut(i).iter_mut().for_each(|x| *x *= di);
        }
        &self.l * &du
    }
}

/// Block LU without pivoting: `A = L·U` where `L` has identity diagonal
/// blocks and `U` is block upper triangular.
pub fn block_lu(a: &Matrix, block_sizes: &[usize]) -> Result<(Matrix, Matrix)> {
    require_square(a)?;
    let n = a.rows();
    if block_sizes.iter().sum::<usize>() != n || block_sizes.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "block sizes {block_sizes:?} do not partition {n}"
        )));
    }
    let mut s = a.clone();
    let mut l = Matrix::identity(n);
    let mut u = Matrix::zeros(n, n);
    let mut start = 0;
    for &b in block_sizes {
        let end = start + b;
        let a11 = s.submatrix(start, end, start, end);
        let a11_inv = inverse(&a11).map_err(|_| Error::ZeroPivot { step: start })?;
        u.set_submatrix(start, start, &s.submatrix(start, end, start, n));
        if end < n {
            let l21 = &s.submatrix(end, n, start, end) * &a11_inv;
            l.set_submatrix(end, start, &l21);
            let a12 = s.submatrix(start, end, end, n);
            let schur = &s.submatrix(end, n, end, n) - &(&l21 * &a12);
            s.set_submatrix(end, end, &schur);
        }
        start = end;
    }
    Ok((l, u))
}

/// LU with complete or rook pivoting together with the numerical rank:
/// the number of leading pivots above `rank_rel·n·max|A|`.
pub fn rank_revealing_lu(a: &Matrix, strategy: Pivoting) -> Result<(LuResult, usize)> {
    rank_revealing_lu_with(a, strategy, &Tolerance::default())
}

pub fn rank_revealing_lu_with(
    a: &Matrix,
    strategy: Pivoting,
    tol: &Tolerance,
) -> Result<(LuResult, usize)> {
    if !matches!(strategy, Pivoting::Complete | Pivoting::Rook) {
        return Err(Error::InvalidArgument("rank-revealing LU needs complete or rook pivoting".into()));
    }
    let f = lu_with(a, strategy, tol)?;
    let r = f.rank(a.max_abs(), tol);
    Ok((f, r))
}
