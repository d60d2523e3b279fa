//! Seeded generators for test and benchmark inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::Matrix;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng>(r: &mut R) -> f64 {
    r.sample(StandardNormal)
}

pub fn random_vector<R: Rng>(r: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| gaussian(r)).collect()
}

/// Entries i.i.d. standard normal.
pub fn random_matrix<R: Rng>(r: &mut R, m: usize, n: usize) -> Matrix {
    Matrix::from_fn(m, n, |_, _| gaussian(r))
}

/// Entries i.i.d. uniform on `[0, 1)`.
pub fn random_uniform<R: Rng>(r: &mut R, m: usize, n: usize) -> Matrix {
    Matrix::from_fn(m, n, |_, _| r.gen::<f64>())
}

/// Haar-distributed orthogonal matrix from the QR of a Gaussian matrix.
pub fn random_orthogonal<R: Rng>(r: &mut R, n: usize) -> Matrix {
    let g = random_matrix(r, n, n);
    let qr = crate::qr::householder_qr(&g);
    let mut q = qr.q;
    // fix signs so the distribution is uniform
    for j in 0..n {
        if qr.r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// `GᵀG + n·I` style positive definite matrix.
pub fn random_spd<R: Rng>(r: &mut R, n: usize) -> Matrix {
    let g = random_matrix(r, n, n);
    let mut a = g.t_mul(&g);
    for i in 0..n {
        a[(i, i)] += 1.0;
    }
    a.symmetrize()
}

/// Symmetric matrix with Gaussian entries.
pub fn random_symmetric<R: Rng>(r: &mut R, n: usize) -> Matrix {
    random_matrix(r, n, n).symmetrize()
}

/// Product of `m × k` and `k × n` Gaussian factors (rank `k` almost surely).
pub fn random_low_rank<R: Rng>(r: &mut R, m: usize, n: usize, k: usize) -> Matrix {
    let a = random_matrix(r, m, k);
    let b = random_matrix(r, k, n);
    &a * &b
}

/// `U·diag(s)·Vᵀ` with Haar-random `U`, `V`.
pub fn with_singular_values<R: Rng>(r: &mut R, m: usize, n: usize, s: &[f64]) -> Matrix {
    let u = random_orthogonal(r, m);
    let v = random_orthogonal(r, n);
    let mut d = Matrix::zeros(m, n);
    for (i, &x) in s.iter().enumerate().take(m.min(n)) {
        d[(i, i)] = x;
    }
    &(&u * &d) * &v.transpose()
}

/// Square matrix with condition number `cond` and geometrically spaced
/// singular values.
pub fn with_condition<R: Rng>(r: &mut R, n: usize, cond: f64) -> Matrix {
    let s: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                1.0
            } else {
                cond.powf(-(i as f64) / (n as f64 - 1.0))
            }
        })
        .collect();
    with_singular_values(r, n, n, &s)
}
