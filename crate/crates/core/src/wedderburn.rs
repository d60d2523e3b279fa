//! Rank-one reduction sequences `A_{k+1} = A_k − w_k⁻¹·A_k·x_k·y_kᵀ·A_k`
//! and the biconjugate decompositions built from them.

use crate::cholesky::CholeskyFactor;
use crate::error::{Error, Result};
use crate::lu::LduResult;
use crate::matrix::{dot, norm2, outer, Matrix, Shape};
use crate::svd::svd;
use crate::tolerance::Tolerance;
use crate::triangular::{lower_inverse, upper_inverse, Diagonal};

/// Source of direction pairs `(x, y)` for each reduction step.
pub trait DirectionSupplier {
    /// Proposes `(x ∈ ℝⁿ, y ∈ ℝᵐ)` for step `step` given the current
    /// reduced matrix. May be called again if the proposal is degenerate;
    /// `None` on the first call for a step stops the run early, leaving a
    /// nonzero remainder; `None` after degenerate proposals is an error.
    fn propose(&mut self, step: usize, a_k: &Matrix) -> Option<(Vec<f64>, Vec<f64>)>;
}

/// Coordinate pairs `(e_i, e_j)`, scanning `i` then `j` in index order and
/// skipping pairs whose `|w| = |A_k[j, i]|` is below the cutoff or at
/// roundoff level relative to the largest entry of `A_k`.
#[derive(Debug, Clone)]
pub struct CoordinateSupplier {
    cutoff: f64,
}

impl CoordinateSupplier {
    pub fn new(cutoff: f64) -> Self {
        CoordinateSupplier { cutoff }
    }

    /// Skips entries at rounding level relative to `a`.
    pub fn for_matrix(a: &Matrix) -> Self {
        CoordinateSupplier { cutoff: zero_cutoff(a) }
    }
}

impl DirectionSupplier for CoordinateSupplier {
    fn propose(&mut self, _step: usize, a_k: &Matrix) -> Option<(Vec<f64>, Vec<f64>)> {
        let (m, n) = a_k.shape();
        let cutoff = self.cutoff.max(remainder_cutoff(m, n, a_k.max_abs()));
        for i in 0..n {
            for j in 0..m {
                if a_k[(j, i)].abs() > cutoff {
                    let mut x = vec![0.0; n];
                    let mut y = vec![0.0; m];
                    x[i] = 1.0;
                    y[j] = 1.0;
                    return Some((x, y));
                }
            }
        }
        None
    }
}

/// Coordinate pair at the largest `|A_k[j, i]|`, the complete-pivoting
/// choice. Keeps the reduced matrices bounded where the index-order
/// supplier can suffer unbounded growth.
#[derive(Debug, Clone, Default)]
pub struct LargestEntrySupplier;

impl DirectionSupplier for LargestEntrySupplier {
    fn propose(&mut self, _step: usize, a_k: &Matrix) -> Option<(Vec<f64>, Vec<f64>)> {
        let (m, n) = a_k.shape();
        let mut best: Option<(usize, usize, f64)> = None;
        for j in 0..m {
            for i in 0..n {
                let x = a_k[(j, i)].abs();
                if x > 0.0 && best.is_none_or(|(_, _, b)| x > b) {
                    best = Some((i, j, x));
                }
            }
        }
        let (i, j, _) = best?;
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; m];
        x[i] = 1.0;
        y[j] = 1.0;
        Some((x, y))
    }
}

/// Columns of fixed `X` and `Y` taken in order.
#[derive(Debug, Clone)]
pub struct ColumnSupplier {
    x: Matrix,
    y: Matrix,
}

impl ColumnSupplier {
    pub fn new(x: Matrix, y: Matrix) -> Self {
        ColumnSupplier { x, y }
    }
}

impl DirectionSupplier for ColumnSupplier {
    fn propose(&mut self, step: usize, _a_k: &Matrix) -> Option<(Vec<f64>, Vec<f64>)> {
        (step < self.x.cols().min(self.y.cols())).then(|| (self.x.col(step), self.y.col(step)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WedderburnStep {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `A_k·x_k`.
    pub phi: Vec<f64>,
    /// `A_kᵀ·y_k`.
    pub psi: Vec<f64>,
    /// `x_k` with its components along earlier `u_i` removed.
    pub u: Vec<f64>,
    /// `y_k` with its components along earlier `v_i` removed.
    pub v: Vec<f64>,
    pub w: f64,
    /// Numerical rank of `A_{k+1}`, when tracked.
    pub next_rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WedderburnSequence {
    pub a0: Matrix,
    pub steps: Vec<WedderburnStep>,
    /// The reduced matrix left after the last step.
    pub remainder: Matrix,
}

impl WedderburnSequence {
    pub fn r(&self) -> usize {
        self.steps.len()
    }

    pub fn omega(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.w).collect()
    }

    fn stack(&self, rows: usize, f: impl Fn(&WedderburnStep) -> &Vec<f64>) -> Matrix {
        Matrix::from_columns(&self.steps.iter().map(|s| f(s).clone()).collect::<Vec<_>>(), rows)
    }

    /// `n × r`.
    pub fn u(&self) -> Matrix {
        self.stack(self.a0.cols(), |s| &s.u)
    }

    /// `m × r`.
    pub fn v(&self) -> Matrix {
        self.stack(self.a0.rows(), |s| &s.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Record the numerical rank of every `A_{k+1}` (one SVD per step).
    pub track_rank: bool,
    /// Proposals tried per step before giving up.
    pub max_retries: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { track_rank: false, max_retries: 8 }
    }
}

/// `⟨x, y⟩_A = yᵀ·A·x`.
fn bilinear(a: &Matrix, x: &[f64], y: &[f64]) -> f64 {
    dot(y, &a.mul_vec(x))
}

/// Rounding-level cutoff on the scale of `A`, for negligible entries and pivots.
fn zero_cutoff(a: &Matrix) -> f64 {
    let (m, n) = a.shape();
    Tolerance::default().rank_cutoff(m, n, a.frobenius())
}

/// Level below which a reduced matrix counts as zero. The reduced matrices
/// carry roundoff of order ε·scale amplified by the pivots' multipliers,
/// hence the margin over the plain rank cutoff.
fn remainder_cutoff(m: usize, n: usize, scale: f64) -> f64 {
    1e3 * Tolerance::default().rank_cutoff(m, n, scale)
}

/// Cutoff for `|w|` relative to the size of the proposed directions.
fn w_cutoff(a: &Matrix, x: &[f64], y: &[f64]) -> f64 {
    zero_cutoff(a) * norm2(x) * norm2(y)
}

/// Incremental construction of `u_k`, `v_k` and the unit upper-triangular
/// coefficients, using only the original matrix.
struct Biconjugator<'a> {
    a: &'a Matrix,
    u: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    /// `A·u_i` and `Aᵀ·v_i`, cached.
    au: Vec<Vec<f64>>,
    atv: Vec<Vec<f64>>,
    w: Vec<f64>,
    rx: Vec<Vec<f64>>,
    ry: Vec<Vec<f64>>,
}

impl<'a> Biconjugator<'a> {
    fn new(a: &'a Matrix) -> Self {
        Biconjugator { a, u: vec![], v: vec![], au: vec![], atv: vec![], w: vec![], rx: vec![], ry: vec![] }
    }

    /// Returns `(u, v, w)` for the next pair without committing it.
    fn reduce(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, f64) {
        let (mut u, mut v) = (x.to_vec(), y.to_vec());
        let (mut cx, mut cy) = (vec![], vec![]);
        // coefficients against the partially reduced vector; equal to the
        // plain formula in exact arithmetic since ⟨u_j, v_i⟩ = 0 for j < i
        for i in 0..self.u.len() {
            let c = dot(&self.atv[i], &u) / self.w[i];
            for (t, s) in u.iter_mut().zip(&self.u[i]) {
                *t -= c * s;
            }
            cx.push(c);
            let d = dot(&self.au[i], &v) / self.w[i];
            for (t, s) in v.iter_mut().zip(&self.v[i]) {
                *t -= d * s;
            }
            cy.push(d);
        }
        let w = bilinear(self.a, &u, &v);
        (u, v, cx, cy, w)
    }

    fn commit(&mut self, u: Vec<f64>, v: Vec<f64>, cx: Vec<f64>, cy: Vec<f64>, w: f64) {
        self.au.push(self.a.mul_vec(&u));
        self.atv.push(self.a.t_mul_vec(&v));
        self.u.push(u);
        self.v.push(v);
        self.w.push(w);
        self.rx.push(cx);
        self.ry.push(cy);
    }

    fn unit_upper(cols: &[Vec<f64>]) -> Matrix {
        let g = cols.len();
        let mut r = Matrix::identity(g);
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                r[(i, j)] = x;
            }
        }
        r
    }
}

/// Runs the reduction until the remainder vanishes. `A_k` is formed by
/// explicit subtraction; `u_k`, `v_k` come from the general-term formula.
pub fn wedderburn_run(a: &Matrix, supplier: &mut dyn DirectionSupplier) -> Result<WedderburnSequence> {
    wedderburn_run_with(a, supplier, RunOptions::default())
}

pub fn wedderburn_run_with(a: &Matrix, supplier: &mut dyn DirectionSupplier, opts: RunOptions) -> Result<WedderburnSequence> {
    a.check_finite()?;
    let (m, n) = a.shape();
    // A_k carries rounding from every subtracted term, so the zero test
    // scales with the largest term as well as with A
    let mut scale = a.frobenius();
    let mut ak = a.clone();
    let mut gen = Biconjugator::new(a);
    let mut steps = Vec::new();
    let mut step = 0;
    while ak.max_abs() > remainder_cutoff(m, n, scale) && step < m.min(n) {
        let mut chosen = None;
        let mut exhausted = false;
        for attempt in 0..opts.max_retries.max(1) {
            let Some((x, y)) = supplier.propose(step, &ak) else {
                exhausted = attempt == 0;
                break;
            };
            if x.len() != n || y.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "direction pair of lengths ({}, {}) for a {m}x{n} matrix",
                    x.len(),
                    y.len()
                )));
            }
            let phi = ak.mul_vec(&x);
            let w = dot(&y, &phi);
            if w.abs() > w_cutoff(a, &x, &y) {
                chosen = Some((x, y, phi, w));
                break;
            }
        }
        if exhausted {
            break;
        }
        let Some((x, y, phi, w)) = chosen else {
            return Err(Error::DegenerateDirection { step });
        };
        let psi = ak.t_mul_vec(&y);
        scale = scale.max(norm2(&phi) * norm2(&psi) / w.abs());
        ak = &ak - &outer(&phi, &psi).scale(1.0 / w);
        let (u, v, cx, cy, _) = gen.reduce(&x, &y);
        gen.commit(u.clone(), v.clone(), cx, cy, w);
        let next_rank = if opts.track_rank { Some(numerical_rank(&ak, a)?) } else { None };
        steps.push(WedderburnStep { x, y, phi, psi, u, v, w, next_rank });
        step += 1;
    }
    Ok(WedderburnSequence { a0: a.clone(), steps, remainder: ak })
}

/// Rank of `b` judged against the scale of `reference`.
pub fn numerical_rank(b: &Matrix, reference: &Matrix) -> Result<usize> {
    let s = svd(b, Shape::Reduced)?.sigma;
    let (m, n) = reference.shape();
    let scale = svd(reference, Shape::Reduced)?.sigma.first().copied().unwrap_or(0.0);
    let cutoff = remainder_cutoff(m, n, scale);
    Ok(s.iter().filter(|&&x| x > cutoff).count())
}

/// `A = Φ·Ω⁻¹·Ψᵀ` with `φ_k = A_k·x_k`, `ψ_k = A_kᵀ·y_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Form1 {
    pub phi: Matrix,
    pub omega: Vec<f64>,
    pub psi: Matrix,
}

impl Form1 {
    pub fn reconstruct(&self) -> Matrix {
        let scaled = Matrix::from_fn(self.phi.rows(), self.phi.cols(), |i, k| self.phi[(i, k)] / self.omega[k]);
        scaled.mul_t(&self.psi)
    }
}

pub fn form1(seq: &WedderburnSequence) -> Form1 {
    let (m, n) = seq.a0.shape();
    Form1 { phi: seq.stack(m, |s| &s.phi), omega: seq.omega(), psi: seq.stack(n, |s| &s.psi) }
}

/// `A·U·Ω⁻¹·Vᵀ·A`.
pub fn form2_reconstruct(seq: &WedderburnSequence) -> Matrix {
    let a = &seq.a0;
    let au = a * &seq.u();
    let omega = seq.omega();
    let scaled = Matrix::from_fn(au.rows(), au.cols(), |i, k| au[(i, k)] / omega[k]);
    &scaled.mul_t(&seq.v()) * a
}

/// `Vᵀ·A·U`, diagonal with entries `w_k`.
pub fn form3(seq: &WedderburnSequence) -> Matrix {
    &(&seq.v().transpose() * &seq.a0) * &seq.u()
}

/// `A_{k+1}` from the general-term formula `A − Σ_{i≤k} w_i⁻¹·A·u_i·v_iᵀ·A`.
pub fn general_term(seq: &WedderburnSequence, k: usize) -> Matrix {
    let a = &seq.a0;
    let mut b = a.clone();
    for s in &seq.steps[..k] {
        let au = a.mul_vec(&s.u);
        let vta = a.t_mul_vec(&s.v);
        b = &b - &outer(&au, &vta).scale(1.0 / s.w);
    }
    b
}

/// `(U, V)` with `VᵀAU = diag(ω)`, `X = U·R_x`, `Y = V·R_y`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiconjugatePair {
    pub u: Matrix,
    pub v: Matrix,
    pub omega: Vec<f64>,
    pub rx: Matrix,
    pub ry: Matrix,
}

impl BiconjugatePair {
    /// `R_yᵀ·Ω·R_x`, the LDU factorization of `YᵀAX`.
    pub fn form4(&self) -> Matrix {
        let g = self.omega.len();
        let orx = Matrix::from_fn(g, g, |i, j| self.omega[i] * self.rx[(i, j)]);
        self.ry.t_mul(&orx)
    }

    /// `det(YᵀAX) = Π w_i`.
    pub fn det(&self) -> f64 {
        self.omega.iter().product()
    }
}

/// Biconjugates the columns of `X` (`n × γ`) and `Y` (`m × γ`) against `A`
/// without forming the reduced matrices.
pub fn biconjugate(a: &Matrix, x: &Matrix, y: &Matrix) -> Result<BiconjugatePair> {
    a.check_finite()?;
    let (m, n) = a.shape();
    if x.rows() != n || y.rows() != m || x.cols() != y.cols() {
        return Err(Error::DimensionMismatch(format!(
            "A is {m}x{n}, X is {}x{}, Y is {}x{}",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        )));
    }
    let mut gen = Biconjugator::new(a);
    for k in 0..x.cols() {
        let (xk, yk) = (x.col(k), y.col(k));
        let (u, v, cx, cy, w) = gen.reduce(&xk, &yk);
        if !(w.abs() > w_cutoff(a, &xk, &yk)) {
            return Err(Error::NotBiconjugatable { step: k });
        }
        gen.commit(u, v, cx, cy, w);
    }
    let g = x.cols();
    Ok(BiconjugatePair {
        u: Matrix::from_columns(&gen.u, n),
        v: Matrix::from_columns(&gen.v, m),
        omega: gen.w,
        rx: Biconjugator::unit_upper(&gen.rx[..g]),
        ry: Biconjugator::unit_upper(&gen.ry[..g]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoverTarget {
    Ldu,
    Cholesky,
    Qr,
    Svd,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Recovered {
    Ldu(LduResult),
    Cholesky(CholeskyFactor),
    /// `A = Q·R` with positive diagonal in `R`.
    Qr { q: Matrix, r: Matrix },
    /// `A = U·diag(σ)·Vᵀ` over the numerical rank.
    Svd { u: Matrix, sigma: Vec<f64>, v: Matrix },
}

fn require_square(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    Ok(())
}

/// Classical factorizations as biconjugate decompositions: `(I, I)` gives
/// LDU and Cholesky, `(I, A)` gives QR, and the singular vectors give SVD.
pub fn recover(a: &Matrix, target: RecoverTarget) -> Result<Recovered> {
    a.check_finite()?;
    match target {
        RecoverTarget::Ldu => {
            require_square(a)?;
            let n = a.rows();
            let p = biconjugate(a, &Matrix::identity(n), &Matrix::identity(n))?;
            // I = U·R_x and I = V·R_y, so L = V⁻ᵀ and the upper factor is U⁻¹
            let l = lower_inverse(&p.v.transpose(), Diagonal::Unit)?;
            let u = upper_inverse(&p.u, Diagonal::Unit)?;
            Ok(Recovered::Ldu(LduResult { l, d: p.omega, u }))
        }
        RecoverTarget::Cholesky => {
            require_square(a)?;
            if !a.is_symmetric(Tolerance::default().rel) {
                return Err(Error::NotSymmetric);
            }
            let n = a.rows();
            let p = biconjugate(a, &Matrix::identity(n), &Matrix::identity(n)).map_err(|e| match e {
                Error::NotBiconjugatable { step } => Error::NotPositiveDefinite { step },
                e => e,
            })?;
            if let Some(step) = p.omega.iter().position(|&w| w <= 0.0) {
                return Err(Error::NotPositiveDefinite { step });
            }
            let uinv = upper_inverse(&p.u, Diagonal::Unit)?;
            let r = Matrix::from_fn(n, n, |i, j| p.omega[i].sqrt() * uinv[(i, j)]);
            Ok(Recovered::Cholesky(CholeskyFactor { r }))
        }
        RecoverTarget::Qr => {
            require_square(a)?;
            let n = a.rows();
            let p = biconjugate(a, &Matrix::identity(n), a).map_err(|e| match e {
                Error::NotBiconjugatable { .. } => Error::Singular,
                e => e,
            })?;
            // w_k = ‖v_k‖² > 0 for nonsingular A
            let q = Matrix::from_fn(n, n, |i, k| p.v[(i, k)] / p.omega[k].sqrt());
            let r = Matrix::from_fn(n, n, |i, j| p.omega[i].sqrt() * p.rx[(i, j)]);
            Ok(Recovered::Qr { q, r })
        }
        RecoverTarget::Svd => {
            let s = svd(a, Shape::Reduced)?;
            let (m, n) = a.shape();
            let r = s.rank;
            let x = s.v.submatrix(0, n, 0, r);
            let y = s.u.submatrix(0, m, 0, r);
            let p = biconjugate(a, &x, &y)?;
            Ok(Recovered::Svd { u: p.v, sigma: p.omega, v: p.u })
        }
    }
}
