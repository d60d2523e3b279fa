//! Decompositions that keep actual rows and columns of the data: CR via
//! reduced row echelon form, rank decompositions, skeleton (CUR) and
//! interpolative decompositions.

use crate::error::{Error, Result};
use crate::lu;
use crate::matrix::{Matrix, Shape};
use crate::qr::{cpqr, CpqrMode};
use crate::tolerance::Tolerance;
use crate::utv::{utv, UtvKind};

/// Largest number of column subsets the optimal interpolative search visits.
pub const SUBSET_CAP: u128 = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RrefResult {
    pub r0: Matrix,
    pub pivot_cols: Vec<usize>,
    pub rank: usize,
}

/// Gauss-Jordan elimination. Columns are scanned left to right; a column
/// holds a pivot when some remaining entry exceeds the cutoff, and the
/// largest such entry is used.
pub fn rref(a: &Matrix) -> RrefResult {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let cutoff = Tolerance::default().rank_cutoff(m, n, a.max_abs());
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for j in 0..n {
        if row == m {
            break;
        }
        let (best, val) =
            (row..m).map(|i| (i, w[(i, j)].abs())).fold((row, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= cutoff {
            for i in row..m {
                w[(i, j)] = 0.0;
            }
            continue;
        }
        w.swap_rows(row, best);
        let p = w[(row, j)];
        for k in j..n {
            w[(row, k)] /= p;
        }
        w[(row, j)] = 1.0;
        for i in 0..m {
            if i == row {
                continue;
            }
            let f = w[(i, j)];
            if f != 0.0 {
                for k in j..n {
                    w[(i, k)] -= f * w[(row, k)];
                }
            }
            w[(i, j)] = 0.0;
        }
        pivot_cols.push(j);
        row += 1;
    }
    for i in row..m {
        for k in 0..n {
            w[(i, k)] = 0.0;
        }
    }
    let rank = pivot_cols.len();
    RrefResult { r0: w, pivot_cols, rank }
}

/// `A = C·R`: `C` the pivot columns of `A`, `R` the nonzero rows of its
/// reduced row echelon form.
#[derive(Debug, Clone, PartialEq)]
pub struct CrResult {
    pub c: Matrix,
    pub r: Matrix,
    pub pivot_cols: Vec<usize>,
}

pub fn cr(a: &Matrix) -> Result<CrResult> {
    a.check_finite()?;
    let e = rref(a);
    Ok(CrResult {
        c: a.select_cols(&e.pivot_cols),
        r: e.r0.submatrix(0, e.rank, 0, a.cols()),
        pivot_cols: e.pivot_cols,
    })
}

/// `A = D·F` with `D` (`m × r`) and `F` (`r × n`) of full rank `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankDecomposition {
    pub d: Matrix,
    pub f: Matrix,
}

/// From the reduced ULV: `D = U_r·L`, `F = V_r` (orthonormal rows).
pub fn rank_decomposition(a: &Matrix) -> Result<RankDecomposition> {
    let g = utv(a, UtvKind::Ulv)?;
    Ok(RankDecomposition { d: &g.u_r() * &g.t11(), f: g.v_r() })
}

/// The nonsingular `P = F₂·F₁ᵀ·(F₁·F₁ᵀ)⁻¹` with `D₁ = D₂·P` for two rank
/// decompositions `D₁·F₁ = D₂·F₂` of the same matrix.
pub fn connection_matrix(f1: &Matrix, f2: &Matrix) -> Result<Matrix> {
    let gram = f1.mul_t(f1);
    Ok(&f2.mul_t(f1) * &lu::inverse(&gram)?)
}

/// `A = C·U⁻¹·R` with `C = A[:, J]`, `R = A[I, :]`, `U = A[I, J]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurResult {
    pub c: Matrix,
    pub u: Matrix,
    pub r: Matrix,
    pub i_s: Vec<usize>,
    pub j_s: Vec<usize>,
}

impl CurResult {
    pub fn rank(&self) -> usize {
        self.j_s.len()
    }

    pub fn reconstruct(&self) -> Result<Matrix> {
        Ok(&(&self.c * &lu::inverse(&self.u)?) * &self.r)
    }

    /// Floats held by the three factors: `r·(m + n) + r²`.
    pub fn storage(&self) -> usize {
        let r = self.rank();
        r * (self.c.rows() + self.r.cols()) + r * r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurMode {
    /// Columns from the CPQR pivots of `A`, rows from those of `Cᵀ`.
    Deterministic,
    Given { i_s: Vec<usize>, j_s: Vec<usize> },
}

fn cpqr_pivots(a: &Matrix) -> Result<Vec<usize>> {
    let (f, rank) = cpqr(a, CpqrMode::Practical, Shape::Reduced)?;
    Ok(f.p.indices()[..rank].to_vec())
}

fn check_indices(idx: &[usize], len: usize) -> Result<()> {
    match idx.iter().find(|&&i| i >= len) {
        Some(&i) => Err(Error::IndexOutOfRange { index: i, len }),
        None => Ok(()),
    }
}

pub fn cur(a: &Matrix, mode: CurMode) -> Result<CurResult> {
    a.check_finite()?;
    let (m, n) = a.shape();
    let (i_s, j_s) = match mode {
        CurMode::Deterministic => {
            let j_s = cpqr_pivots(a)?;
            let i_s = cpqr_pivots(&a.select_cols(&j_s).transpose())?;
            (i_s, j_s)
        }
        CurMode::Given { i_s, j_s } => {
            check_indices(&i_s, m)?;
            check_indices(&j_s, n)?;
            if i_s.len() != j_s.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} row indices with {} column indices",
                    i_s.len(),
                    j_s.len()
                )));
            }
            (i_s, j_s)
        }
    };
    let u = a.select_rows(&i_s).select_cols(&j_s);
    let (_, rank) = lu::rank_revealing_lu(&u, lu::Pivoting::Complete)?;
    if rank < u.rows() {
        return Err(Error::SingularIntersection);
    }
    Ok(CurResult { c: a.select_cols(&j_s), u, r: a.select_rows(&i_s), i_s, j_s })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdMode {
    /// Columns maximizing `|det|` over all subsets; coefficients bounded by 1.
    Optimal,
    /// Columns from the CPQR pivots.
    Cpqr,
}

/// Column interpolative decomposition `A = C·W` with `C = A[:, J]` and
/// `W[:, J] = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdResult {
    pub c: Matrix,
    pub w: Matrix,
    pub j_s: Vec<usize>,
    pub max_coeff: f64,
}

impl IdResult {
    pub fn reconstruct(&self) -> Matrix {
        &self.c * &self.w
    }
}

/// Row interpolative decomposition `A = Z·A[I, :]` with `Z[I, :] = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowIdResult {
    pub z: Matrix,
    pub r: Matrix,
    pub i_s: Vec<usize>,
    pub max_coeff: f64,
}

impl RowIdResult {
    pub fn reconstruct(&self) -> Matrix {
        &self.z * &self.r
    }
}

/// `A = Z·U·W` with `U = A[I, J]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSidedId {
    pub z: Matrix,
    pub u: Matrix,
    pub w: Matrix,
    pub i_s: Vec<usize>,
    pub j_s: Vec<usize>,
}

impl TwoSidedId {
    pub fn reconstruct(&self) -> Matrix {
        &(&self.z * &self.u) * &self.w
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Advances `idx` to the next `k`-subset of `0..n` in lexicographic order.
fn next_subset(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for pos in (0..k).rev() {
        if idx[pos] < n - k + pos {
            idx[pos] += 1;
            for q in pos + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Lexicographically first subset with the largest `|det(f[:, J])|`.
fn max_volume_columns(f: &Matrix) -> Result<Vec<usize>> {
    let (r, n) = f.shape();
    let subsets = binomial(n, r);
    if subsets > SUBSET_CAP {
        return Err(Error::SubsetCap { subsets, cap: SUBSET_CAP });
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut best = idx.clone();
    let mut best_det = -1.0;
    loop {
        let d = lu::det(&f.select_cols(&idx))?.abs();
        if d > best_det {
            best_det = d;
            best = idx.clone();
        }
        if !next_subset(&mut idx, n) {
            break;
        }
    }
    Ok(best)
}

pub fn id_column(a: &Matrix, mode: IdMode) -> Result<IdResult> {
    a.check_finite()?;
    let rd = rank_decomposition(a)?;
    let f = &rd.f;
    let mut j_s = match mode {
        IdMode::Optimal => max_volume_columns(f)?,
        IdMode::Cpqr => cpqr_pivots(a)?,
    };
    if mode == IdMode::Optimal {
        j_s.sort_unstable();
    }
    let basis = lu::lu(&f.select_cols(&j_s), lu::Pivoting::Partial)?;
    let mut w = basis.solve_matrix(f)?;
    for (k, &j) in j_s.iter().enumerate() {
        for i in 0..j_s.len() {
            w[(i, j)] = if i == k { 1.0 } else { 0.0 };
        }
    }
    let max_coeff = w.max_abs();
    Ok(IdResult { c: a.select_cols(&j_s), w, j_s, max_coeff })
}

/// Column ID of `Aᵀ`, transposed.
pub fn id_row(a: &Matrix, mode: IdMode) -> Result<RowIdResult> {
    let t = id_column(&a.transpose(), mode)?;
    Ok(RowIdResult { z: t.w.transpose(), r: t.c.transpose(), i_s: t.j_s, max_coeff: t.max_coeff })
}

/// Column ID `A = C·W`, then row ID of `C`: `C = Z·A[I, J]`.
pub fn id_two_sided(a: &Matrix, mode: IdMode) -> Result<TwoSidedId> {
    let col = id_column(a, mode)?;
    let row = id_row(&col.c, mode)?;
    Ok(TwoSidedId { u: row.r, z: row.z, w: col.w, i_s: row.i_s, j_s: col.j_s })
}
