//! Householder reflectors and Givens rotations, applied implicitly.

use crate::error::{Error, Result};
use crate::matrix::{dot, norm2, Matrix};

/// `H = I − 2uuᵀ` acting on coordinates `offset..offset + u.len()`.
///
/// A zero `u` encodes the identity; it only arises when the caller asks for
/// a positive target sign on a vector that is already aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholderReflector {
    pub u: Vec<f64>,
    pub offset: usize,
}

/// Sign rule for the target entry `r` of the reflected vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectSign {
    /// `r = −sign(x[target])·‖x‖`, avoiding cancellation in `x − r·e`.
    Stable,
    /// `r = +‖x‖`.
    Positive,
}

/// Reflector mapping `x` to `r·e_target` with the stable sign rule.
pub fn make_householder(x: &[f64], target: usize) -> Result<(HouseholderReflector, f64)> {
    make_householder_signed(x, target, ReflectSign::Stable)
}

pub fn make_householder_signed(
    x: &[f64],
    target: usize,
    sign: ReflectSign,
) -> Result<(HouseholderReflector, f64)> {
    if target >= x.len() {
        return Err(Error::IndexOutOfRange { index: target, len: x.len() });
    }
    let nx = norm2(x);
    if nx == 0.0 {
        return Err(Error::ZeroVector);
    }
    let r = match sign {
        ReflectSign::Stable => {
            if x[target] >= 0.0 {
                -nx
            } else {
                nx
            }
        }
        ReflectSign::Positive => nx,
    };
    let mut v = x.to_vec();
    v[target] -= r;
    let nv = norm2(&v);
    if nv == 0.0 {
        return Ok((HouseholderReflector { u: vec![0.0; x.len()], offset: 0 }, r));
    }
    v.iter_mut().for_each(|e| *e /= nv);
    Ok((HouseholderReflector { u: v, offset: 0 }, r))
}

impl HouseholderReflector {
    pub fn with_offset(mut self, offset: usize) -> Self {
        self.offset = offset;
        self
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn is_identity(&self) -> bool {
        self.u.iter().all(|&x| x == 0.0)
    }

    pub fn apply_vec(&self, x: &mut [f64]) {
        let seg = &mut x[self.offset..self.offset + self.u.len()];
        let t = 2.0 * dot(&self.u, seg);
        for (s, &ui) in seg.iter_mut().zip(&self.u) {
            *s -= t * ui;
        }
    }

    /// `A ← H·A` restricted to columns `c0..a.cols()`.
    pub fn apply_left(&self, a: &mut Matrix, c0: usize) {
        let n = a.cols();
        let mut w = vec![0.0; n];
        for (k, &uk) in self.u.iter().enumerate() {
            if uk == 0.0 {
                continue;
            }
            let row = a.row(self.offset + k);
            for j in c0..n {
                w[j] += uk * row[j];
            }
        }
        for (k, &uk) in self.u.iter().enumerate() {
            if uk == 0.0 {
                continue;
            }
            let row = a.row_mut(self.offset + k);
            for j in c0..n {
                row[j] -= 2.0 * uk * w[j];
            }
        }
    }

    /// `A ← A·H` restricted to rows `r0..a.rows()`.
    pub fn apply_right(&self, a: &mut Matrix, r0: usize) {
        let off = self.offset;
        let d = self.u.len();
        for i in r0..a.rows() {
            let row = a.row_mut(i);
            let t = 2.0 * dot(&row[off..off + d], &self.u);
            if t == 0.0 {
                continue;
            }
            for (x, &uk) in row[off..off + d].iter_mut().zip(&self.u) {
                *x -= t * uk;
            }
        }
    }

    /// Explicit `n × n` matrix with the reflector embedded at `offset`.
    pub fn to_matrix(&self, n: usize) -> Matrix {
        let mut h = Matrix::identity(n);
        self.apply_left(&mut h, 0);
        h
    }
}

/// Plane rotation in coordinates `k < l`:
/// `x_k' = c·x_k + s·x_l`, `x_l' = −s·x_k + c·x_l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensRotation {
    pub k: usize,
    pub l: usize,
    pub c: f64,
    pub s: f64,
}

/// Rotation sending `(x_k, x_l)` to `(√(x_k²+x_l²), 0)`, in plane `(0, 1)`.
///
/// When both inputs are zero the identity rotation is returned together
/// with `true`.
pub fn make_givens(x_k: f64, x_l: f64) -> (GivensRotation, bool) {
    let (g, _, degenerate) = GivensRotation::zeroing(0, 1, x_k, x_l);
    (g, degenerate)
}

impl GivensRotation {
    pub fn identity(k: usize, l: usize) -> Self {
        GivensRotation { k, l, c: 1.0, s: 0.0 }
    }

    /// Rotation in plane `(k, l)` that zeroes the `l` component of
    /// `(x_k, x_l)`. Returns the rotation, the resulting `x_k`, and whether
    /// the input was the zero pair.
    pub fn zeroing(k: usize, l: usize, x_k: f64, x_l: f64) -> (Self, f64, bool) {
        if x_l == 0.0 {
            return (GivensRotation { k, l, c: 1.0, s: 0.0 }, x_k, x_k == 0.0);
        }
        let r = x_k.hypot(x_l);
        (GivensRotation { k, l, c: x_k / r, s: x_l / r }, r, false)
    }

    pub fn at(self, k: usize, l: usize) -> Self {
        GivensRotation { k, l, ..self }
    }

    pub fn transpose(self) -> Self {
        GivensRotation { s: -self.s, ..self }
    }

    pub fn apply_pair(&self, xk: f64, xl: f64) -> (f64, f64) {
        (self.c * xk + self.s * xl, -self.s * xk + self.c * xl)
    }

    pub fn apply_vec(&self, x: &mut [f64]) {
        let (a, b) = self.apply_pair(x[self.k], x[self.l]);
        x[self.k] = a;
        x[self.l] = b;
    }

    /// `A ← G·A` on columns `c0..a.cols()`.
    pub fn apply_left(&self, a: &mut Matrix, c0: usize) {
        for j in c0..a.cols() {
            let (x, y) = self.apply_pair(a[(self.k, j)], a[(self.l, j)]);
            a[(self.k, j)] = x;
            a[(self.l, j)] = y;
        }
    }

    /// `A ← A·Gᵀ`; used to accumulate `Q` when `G` was applied on the left.
    pub fn apply_right_transpose(&self, a: &mut Matrix) {
        for i in 0..a.rows() {
            let (x, y) = self.apply_pair(a[(i, self.k)], a[(i, self.l)]);
            a[(i, self.k)] = x;
            a[(i, self.l)] = y;
        }
    }

    /// `A ← A·G`.
    pub fn apply_right(&self, a: &mut Matrix) {
        self.transpose().apply_right_transpose(a);
    }

    pub fn to_matrix(&self, n: usize) -> Matrix {
        let mut g = Matrix::identity(n);
        g[(self.k, self.k)] = self.c;
        g[(self.k, self.l)] = self.s;
        g[(self.l, self.k)] = -self.s;
        g[(self.l, self.l)] = self.c;
        g
    }
}
