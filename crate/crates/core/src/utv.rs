//! ULV, URV and complete orthogonal decompositions `A = U·T·V`.

use crate::error::Result;
use crate::matrix::{Matrix, Shape};
use crate::qr::{cpqr, lq, CpqrMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtvKind {
    /// Leading block lower triangular.
    Ulv,
    /// Leading block upper triangular.
    Urv,
    /// Leading block nonsingular, not necessarily triangular.
    Complete,
}

/// `A = U·T·V` with `U`, `V` orthogonal and `T` zero outside its leading
/// `rank × rank` block. Note `V` is applied as is, not transposed.
#[derive(Debug, Clone, PartialEq)]
pub struct UtvResult {
    pub u: Matrix,
    pub t: Matrix,
    pub v: Matrix,
    pub rank: usize,
    pub kind: UtvKind,
}

impl UtvResult {
    pub fn reconstruct(&self) -> Matrix {
        &(&self.u * &self.t) * &self.v
    }

    /// `U[:, :r]`.
    pub fn u_r(&self) -> Matrix {
        self.u.submatrix(0, self.u.rows(), 0, self.rank)
    }

    /// `T[:r, :r]`.
    pub fn t11(&self) -> Matrix {
        self.t.submatrix(0, self.rank, 0, self.rank)
    }

    /// `V[:r, :]`.
    pub fn v_r(&self) -> Matrix {
        self.v.submatrix(0, self.rank, 0, self.v.cols())
    }
}

/// CPQR `A·P = Q·[R11 R12; 0 0]`, then a full LQ of `[R11 R12]`, pivoted
/// or not. Unpivoted gives ULV; pivoted gives a complete orthogonal form.
fn cpqr_then_lq(a: &Matrix, pivot_second: bool, kind: UtvKind) -> Result<UtvResult> {
    let (m, n) = a.shape();
    let (f, rank) = cpqr(a, CpqrMode::Practical, Shape::Full)?;
    let top = f.r.submatrix(0, rank, 0, n);
    let mut t = Matrix::zeros(m, n);
    // V = V0·Pᵀ, i.e. columns of V0 scattered back to original positions
    let (t11, v0) = if rank == 0 {
        (Matrix::zeros(0, 0), Matrix::identity(n))
    } else {
        let g = lq(&top, Shape::Full, pivot_second)?;
        // Pᵀ_2·top = L·V0, so top = P2·L·V0
        let l = g.p.inverse().gather_rows(&g.l);
        (l.submatrix(0, rank, 0, rank), g.q)
    };
    t.set_submatrix(0, 0, &t11);
    let v = f.p.inverse().gather_cols(&v0);
    Ok(UtvResult { u: f.q, t, v, rank, kind })
}

pub fn utv(a: &Matrix, kind: UtvKind) -> Result<UtvResult> {
    a.check_finite()?;
    match kind {
        UtvKind::Ulv => cpqr_then_lq(a, false, kind),
        UtvKind::Complete => cpqr_then_lq(a, true, kind),
        UtvKind::Urv => {
            // ULV of Aᵀ, transposed
            let g = cpqr_then_lq(&a.transpose(), false, kind)?;
            Ok(UtvResult { u: g.v.transpose(), t: g.t.transpose(), v: g.u.transpose(), rank: g.rank, kind })
        }
    }
}

/// Complete orthogonal decomposition whose second factorization may be
/// taken unpivoted, in which case it coincides with ULV.
pub fn complete_orthogonal(a: &Matrix, pivot_second: bool) -> Result<UtvResult> {
    a.check_finite()?;
    cpqr_then_lq(a, pivot_second, UtvKind::Complete)
}

/// Orthonormal bases of `C(A)`, `N(Aᵀ)`, `C(Aᵀ)` and `N(A)` as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBases {
    pub col: Matrix,
    pub left_null: Matrix,
    pub row: Matrix,
    pub null: Matrix,
}

pub fn four_subspace_bases(res: &UtvResult) -> SubspaceBases {
    let (m, n) = (res.u.rows(), res.v.cols());
    let r = res.rank;
    SubspaceBases {
        col: res.u.submatrix(0, m, 0, r),
        left_null: res.u.submatrix(0, m, r, m),
        row: res.v.submatrix(0, r, 0, n).transpose(),
        null: res.v.submatrix(r, n, 0, n).transpose(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_low_rank, random_orthogonal, random_vector, rng};
    use crate::svd::svd;

    fn check(a: &Matrix, f: &UtvResult) {
        assert!(f.reconstruct().rel_diff(a) <= 1e-10, "{:?} residual {}", f.kind, f.reconstruct().rel_diff(a));
        assert!(f.u.orthogonality_defect() <= 1e-12);
        assert!(f.v.transpose().orthogonality_defect() <= 1e-12);
        let (m, n) = a.shape();
        for i in 0..m {
            for j in 0..n {
                if i >= f.rank || j >= f.rank {
                    assert_eq!(f.t[(i, j)], 0.0);
                }
            }
        }
        let t11 = f.t11();
        match f.kind {
            UtvKind::Ulv => assert!(t11.is_lower_triangular()),
            UtvKind::Urv => assert!(t11.is_upper_triangular()),
            UtvKind::Complete => {}
        }
        let reduced = &(&f.u_r() * &t11) * &f.v_r();
        assert!(reduced.rel_diff(a) <= 1e-10);
    }

    fn projector(b: &Matrix) -> Matrix {
        b.mul_t(b)
    }

    #[test]
    fn diagonal_example() {
        let a = Matrix::from_diag(&[3.0, 0.0]);
        for kind in [UtvKind::Ulv, UtvKind::Urv, UtvKind::Complete] {
            let f = utv(&a, kind).unwrap();
            assert_eq!(f.rank, 1);
            assert!((f.t[(0, 0)].abs() - 3.0).abs() < 1e-15);
            check(&a, &f);
        }
    }

    #[test]
    fn low_rank_all_kinds() {
        let mut r = rng(1);
        let a = random_low_rank(&mut r, 8, 6, 3);
        for kind in [UtvKind::Ulv, UtvKind::Urv, UtvKind::Complete] {
            let f = utv(&a, kind).unwrap();
            assert_eq!(f.rank, 3);
            check(&a, &f);
        }
        let w = random_low_rank(&mut r, 4, 9, 2);
        for kind in [UtvKind::Ulv, UtvKind::Urv, UtvKind::Complete] {
            check(&w, &utv(&w, kind).unwrap());
        }
    }

    #[test]
    fn orthogonal_is_full_rank() {
        let mut r = rng(2);
        let q = random_orthogonal(&mut r, 5);
        let f = utv(&q, UtvKind::Complete).unwrap();
        assert_eq!(f.rank, 5);
        assert!(crate::lu::det(&f.t).unwrap().abs() > 0.5);
    }

    #[test]
    fn unpivoted_complete_is_ulv() {
        let mut r = rng(3);
        let a = random_low_rank(&mut r, 7, 5, 3);
        let c = complete_orthogonal(&a, false).unwrap();
        let u = utv(&a, UtvKind::Ulv).unwrap();
        assert_eq!(c.t, u.t);
        assert_eq!(c.u, u.u);
        assert_eq!(c.v, u.v);
    }

    #[test]
    fn subspaces_match_svd() {
        let mut r = rng(4);
        let a = random_low_rank(&mut r, 7, 6, 4);
        let s = svd(&a, Shape::Full).unwrap();
        for kind in [UtvKind::Ulv, UtvKind::Urv, UtvKind::Complete] {
            let f = utv(&a, kind).unwrap();
            let b = four_subspace_bases(&f);
            assert_eq!((b.col.cols(), b.left_null.cols(), b.row.cols(), b.null.cols()), (4, 3, 4, 2));
            let pc = projector(&s.u.submatrix(0, 7, 0, 4));
            let pr = projector(&s.v.submatrix(0, 6, 0, 4));
            assert!((&projector(&b.col) - &pc).max_abs() <= 1e-9);
            assert!((&projector(&b.row) - &pr).max_abs() <= 1e-9);
            assert!((&a * &b.null).max_abs() <= 1e-10 * a.max_abs());
            assert!(a.t_mul(&b.left_null).max_abs() <= 1e-10 * a.max_abs());
        }
    }

    #[test]
    fn identity_and_rank_one() {
        let f = utv(&Matrix::identity(3), UtvKind::Ulv).unwrap();
        let b = four_subspace_bases(&f);
        assert!((&projector(&b.col) - &Matrix::identity(3)).max_abs() < 1e-14);
        assert_eq!(b.null.cols(), 0);

        let mut r = rng(5);
        let (u, v) = (random_vector(&mut r, 5), random_vector(&mut r, 4));
        let a = crate::matrix::outer(&u, &v);
        let b = four_subspace_bases(&utv(&a, UtvKind::Urv).unwrap());
        let nu = crate::matrix::norm2(&u);
        let un: Vec<f64> = u.iter().map(|x| x / nu).collect();
        assert!((&projector(&b.col) - &crate::matrix::outer(&un, &un)).max_abs() < 1e-12);
        assert_eq!(b.row.cols() + b.null.cols(), 4);
    }
}
