//! Forward and backward substitution.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// How the diagonal of a triangular factor is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagonal {
    /// Use the stored diagonal.
    Stored,
    /// Treat the diagonal as ones without reading it.
    Unit,
}

fn check(t: &Matrix, b: &[f64]) -> Result<()> {
    if !t.is_square() {
        return Err(Error::NotSquare { rows: t.rows(), cols: t.cols() });
    }
    if t.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} system with rhs of length {}",
            t.rows(),
            t.cols(),
            b.len()
        )));
    }
    Ok(())
}

/// Solves `L·x = b` for lower-triangular `L`. Entries above the diagonal
/// are ignored.
pub fn forward_substitution(l: &Matrix, b: &[f64], diag: Diagonal) -> Result<Vec<f64>> {
    check(l, b)?;
    let n = b.len();
    let mut x = b.to_vec();
    for i in 0..n {
        let row = l.row(i);
        let mut s = x[i];
        for j in 0..i {
            s -= row[j] * x[j];
        }
        x[i] = match diag {
            Diagonal::Unit => s,
            Diagonal::Stored => {
                if row[i] == 0.0 {
                    return Err(Error::SingularTriangular { index: i });
                }
                s / row[i]
            }
        };
    }
    Ok(x)
}

/// Solves `U·x = b` for upper-triangular `U`. Entries below the diagonal
/// are ignored.
pub fn backward_substitution(u: &Matrix, b: &[f64], diag: Diagonal) -> Result<Vec<f64>> {
    check(u, b)?;
    let n = b.len();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let row = u.row(i);
        let mut s = x[i];
        for j in i + 1..n {
            s -= row[j] * x[j];
        }
        x[i] = match diag {
            Diagonal::Unit => s,
            Diagonal::Stored => {
                if row[i] == 0.0 {
                    return Err(Error::SingularTriangular { index: i });
                }
                s / row[i]
            }
        };
    }
    Ok(x)
}

/// Inverse of an upper-triangular matrix, column by column.
pub fn upper_inverse(u: &Matrix, diag: Diagonal) -> Result<Matrix> {
    let n = u.rows();
    let mut inv = Matrix::zeros(n, n);
    for j in 0..n {
        // column j of U⁻¹ is supported on rows 0..=j
        let mut e = vec![0.0; j + 1];
        e[j] = 1.0;
        let x = backward_substitution(&u.submatrix(0, j + 1, 0, j + 1), &e, diag)?;
        for (i, v) in x.into_iter().enumerate() {
            inv[(i, j)] = v;
        }
    }
    Ok(inv)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse(l: &Matrix, diag: Diagonal) -> Result<Matrix> {
    Ok(upper_inverse(&l.transpose(), diag)?.transpose())
}

/// Solves `U·X = B` column by column.
pub fn backward_substitution_matrix(u: &Matrix, b: &Matrix, diag: Diagonal) -> Result<Matrix> {
    let mut x = Matrix::zeros(u.cols(), b.cols());
    for j in 0..b.cols() {
        x.set_col(j, &backward_substitution(u, &b.col(j), diag)?);
    }
    Ok(x)
}

/// Solves `L·X = B` column by column.
pub fn forward_substitution_matrix(l: &Matrix, b: &Matrix, diag: Diagonal) -> Result<Matrix> {
    let mut x = Matrix::zeros(l.cols(), b.cols());
    for j in 0..b.cols() {
        x.set_col(j, &forward_substitution(l, &b.col(j), diag)?);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::norm2;
    use crate::random::{random_vector, rng};
    use rand::Rng;

    #[test]
    fn identity_solves() {
        let b = [1.0, -2.0, 3.5];
        let i = Matrix::identity(3);
        assert_eq!(forward_substitution(&i, &b, Diagonal::Stored).unwrap(), b);
        assert_eq!(backward_substitution(&i, &b, Diagonal::Stored).unwrap(), b);
    }

    #[test]
    fn small_hand_solves() {
        let l = Matrix::from_rows(&[[1.0, 0.0], [2.0, 1.0]]);
        assert_eq!(forward_substitution(&l, &[1.0, 4.0], Diagonal::Stored).unwrap(), vec![1.0, 2.0]);
        let u = Matrix::from_rows(&[[2.0, 1.0], [0.0, 3.0]]);
        assert_eq!(backward_substitution(&u, &[4.0, 3.0], Diagonal::Stored).unwrap(), vec![1.5, 1.0]);
    }

    #[test]
    fn zero_diagonal_is_singular() {
        let u = Matrix::from_rows(&[[1.0, 1.0], [0.0, 0.0]]);
        assert_eq!(
            backward_substitution(&u, &[1.0, 1.0], Diagonal::Stored),
            Err(Error::SingularTriangular { index: 1 })
        );
    }

    #[test]
    fn residual_on_random_unit_lower() {
        let mut r = rng(3);
        let n = 50;
        let l = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                1.0
            } else if j < i {
                r.gen_range(-1.0..1.0) / n as f64
            } else {
                0.0
            }
        });
        let b = random_vector(&mut r, n);
        let x = forward_substitution(&l, &b, Diagonal::Unit).unwrap();
        let res: Vec<f64> = l.mul_vec(&x).iter().zip(&b).map(|(a, b)| a - b).collect();
        assert!(norm2(&res) <= 1e-12 * norm2(&b));
        let u = l.transpose();
        let x = backward_substitution(&u, &b, Diagonal::Unit).unwrap();
        let res: Vec<f64> = u.mul_vec(&x).iter().zip(&b).map(|(a, b)| a - b).collect();
        assert!(norm2(&res) <= 1e-12 * norm2(&b));
    }

    #[test]
    fn triangular_inverse() {
        let u = Matrix::from_rows(&[[2.0, 1.0, -1.0], [0.0, 3.0, 2.0], [0.0, 0.0, 4.0]]);
        let inv = upper_inverse(&u, Diagonal::Stored).unwrap();
        assert!((&u * &inv).rel_diff(&Matrix::identity(3)) < 1e-15);
        assert!(inv.is_upper_triangular());
    }
}
