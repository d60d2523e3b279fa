//! Low-rank factorization `A ≈ W·Z` by alternating least squares, by
//! normalized gradient steps, and by nonnegative multiplicative updates.

use std::ops::Range;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::cholesky::cholesky;
use crate::error::{Error, Result};
use crate::matrix::{norm2, Matrix, Shape};
use crate::qr::{cpqr, CpqrMode};
use crate::random::{rng, TestRng};
use crate::svd::svd;
use crate::triangular::{backward_substitution, forward_substitution, Diagonal};

#[derive(Debug, Clone, PartialEq)]
pub struct AlsConfig {
    pub lambda_w: f64,
    pub lambda_z: f64,
    pub eta_w: f64,
    pub eta_z: f64,
    pub max_iter: usize,
    /// Stop once the relative change in loss between sweeps is at most this.
    pub tol: f64,
    pub seed: u64,
    pub bias: bool,
}

impl Default for AlsConfig {
    fn default() -> Self {
        AlsConfig {
            lambda_w: 0.1,
            lambda_z: 0.1,
            eta_w: 0.01,
            eta_z: 0.01,
            max_iter: 200,
            tol: 1e-10,
            seed: 0,
            bias: false,
        }
    }
}

impl AlsConfig {
    fn validate(&self) -> Result<()> {
        let fields = [
            ("lambda_w", self.lambda_w),
            ("lambda_z", self.lambda_z),
            ("eta_w", self.eta_w),
            ("eta_z", self.eta_z),
            ("tol", self.tol),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!("{name}={v} must be finite and nonnegative")));
            }
        }
        Ok(())
    }
}

/// Fitted factors. With `bias`, the inner dimension is `k + 2`: column 0
/// of `w` fits the fixed ones row 0 of `z`, and the last row of `z` fits
/// the fixed ones last column of `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    pub w: Matrix,
    pub z: Matrix,
    pub k: usize,
    pub bias: bool,
    /// Objective after initialization, then after every sweep.
    pub loss_history: Vec<f64>,
}

impl FactorPair {
    pub fn product(&self) -> Matrix {
        &self.w * &self.z
    }

    pub fn loss(&self) -> f64 {
        self.loss_history.last().copied().unwrap_or(f64::NAN)
    }

    pub fn sweeps(&self) -> usize {
        self.loss_history.len().saturating_sub(1)
    }
}

/// Partially observed matrix. Cells with `mask == 0` are ignored and may
/// hold any value, including NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedMatrix {
    pub a: Matrix,
    pub mask: Matrix,
}

impl MaskedMatrix {
    pub fn new(a: Matrix, mask: Matrix) -> Result<Self> {
        if a.shape() != mask.shape() {
            return Err(Error::DimensionMismatch(format!(
                "values {:?} vs mask {:?}",
                a.shape(),
                mask.shape()
            )));
        }
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let m = mask[(i, j)];
                if m != 0.0 && m != 1.0 {
                    return Err(Error::InvalidArgument(format!("mask entry ({i}, {j}) = {m} is not 0 or 1")));
                }
                if m == 1.0 && !a[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(MaskedMatrix { a, mask })
    }

    pub fn full(a: Matrix) -> Self {
        let mask = Matrix::from_fn(a.rows(), a.cols(), |_, _| 1.0);
        MaskedMatrix { a, mask }
    }

    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.mask[(i, j)] != 0.0
    }

    pub fn observed_count(&self) -> usize {
        self.mask.as_slice().iter().filter(|&&m| m != 0.0).count()
    }

    /// Rows with no observed cell; their factor rows are fit by shrinkage only.
    pub fn empty_rows(&self) -> Vec<usize> {
        (0..self.a.rows()).filter(|&i| (0..self.a.cols()).all(|j| !self.is_observed(i, j))).collect()
    }

    pub fn empty_cols(&self) -> Vec<usize> {
        (0..self.a.cols()).filter(|&j| (0..self.a.rows()).all(|i| !self.is_observed(i, j))).collect()
    }

    /// Root-mean-square error of `pred` over observed (`true`) or hidden cells.
    pub fn rmse(&self, pred: &Matrix, observed: bool) -> f64 {
        let (mut s, mut c) = (0.0, 0usize);
        for i in 0..self.a.rows() {
            for j in 0..self.a.cols() {
                if self.is_observed(i, j) == observed {
                    let e = self.a[(i, j)] - pred[(i, j)];
                    s += e * e;
                    c += 1;
                }
            }
        }
        if c == 0 {
            0.0
        } else {
            (s / c as f64).sqrt()
        }
    }
}

/// Placement of the free and fixed parts of the factors.
#[derive(Debug, Clone, Copy)]
struct Layout {
    d: usize,
    bias: bool,
}

impl Layout {
    fn new(k: usize, bias: bool) -> Self {
        Layout { d: if bias { k + 2 } else { k }, bias }
    }

    fn z_free(&self) -> Range<usize> {
        if self.bias {
            1..self.d
        } else {
            0..self.d
        }
    }

    fn w_free(&self) -> Range<usize> {
        if self.bias {
            0..self.d - 1
        } else {
            0..self.d
        }
    }

    /// Column of `W` that meets the fixed ones row of `Z`.
    fn z_offset(&self) -> Option<usize> {
        self.bias.then_some(0)
    }

    /// Row of `Z` that meets the fixed ones column of `W`.
    fn w_offset(&self) -> Option<usize> {
        self.bias.then(|| self.d - 1)
    }

    fn pin(&self, w: &mut Matrix, z: &mut Matrix) {
        if self.bias {
            for i in 0..w.rows() {
                w[(i, self.d - 1)] = 1.0;
            }
            for j in 0..z.cols() {
                z[(0, j)] = 1.0;
            }
        }
    }
}

fn check_k(k: usize, bias: bool) -> Result<()> {
    if k == 0 && !bias {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    Ok(())
}

fn is_obs(mask: Option<&Matrix>, i: usize, j: usize) -> bool {
    mask.is_none_or(|m| m[(i, j)] != 0.0)
}

fn objective(a: &Matrix, mask: Option<&Matrix>, w: &Matrix, z: &Matrix, cfg: &AlsConfig) -> f64 {
    let p = w * z;
    let mut fit = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if is_obs(mask, i, j) {
                let e = a[(i, j)] - p[(i, j)];
                fit += e * e;
            }
        }
    }
    fit + cfg.lambda_w * w.frobenius().powi(2) + cfg.lambda_z * z.frobenius().powi(2)
}

/// `√(mean|a| / k)` over observed cells.
fn mean_scale(a: &Matrix, mask: Option<&Matrix>, k: usize) -> f64 {
    let (mut s, mut c) = (0.0, 0usize);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if is_obs(mask, i, j) {
                s += a[(i, j)].abs();
                c += 1;
            }
        }
    }
    if c == 0 {
        return 0.0;
    }
    (s / c as f64 / k.max(1) as f64).sqrt()
}

fn random_factors(r: &mut TestRng, m: usize, n: usize, d: usize, scale: f64) -> (Matrix, Matrix) {
    let w = Matrix::from_fn(m, d, |_, _| scale * r.gen::<f64>());
    let z = Matrix::from_fn(d, n, |_, _| scale * r.gen::<f64>());
    (w, z)
}

fn converged(prev: f64, cur: f64, tol: f64) -> bool {
    cur == 0.0 || (prev - cur).abs() <= tol * prev.abs()
}

fn record(history: &mut Vec<f64>, loss: f64) -> Result<()> {
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss { iteration: history.len() });
    }
    history.push(loss);
    Ok(())
}

/// `Σ_{i∈obs} x_i·x_iᵀ + λI` over the `free` columns of `x`.
fn normal_matrix(x: &Matrix, obs: &[usize], free: Range<usize>, lambda: f64) -> Matrix {
    let k = free.len();
    let mut g = Matrix::zeros(k, k);
    for &i in obs {
        let row = &x.row(i)[free.clone()];
        for p in 0..k {
            for q in p..k {
                g[(p, q)] += row[p] * row[q];
            }
        }
    }
    for p in 0..k {
        g[(p, p)] += lambda;
        for q in 0..p {
            g[(p, q)] = g[(q, p)];
        }
    }
    g
}

/// `Σ_{i∈obs} x_i·(t_i − x_i[offset])` over the `free` columns of `x`.
fn normal_rhs(x: &Matrix, obs: &[usize], free: Range<usize>, offset: Option<usize>, t: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut b = vec![0.0; free.len()];
    for &i in obs {
        let row = x.row(i);
        let target = t(i) - offset.map_or(0.0, |c| row[c]);
        for (bp, &xp) in b.iter_mut().zip(&row[free.clone()]) {
            *bp += xp * target;
        }
    }
    b
}

struct SpdSolver {
    l: Matrix,
    r: Matrix,
}

impl SpdSolver {
    fn new(g: &Matrix) -> Result<Self> {
        match cholesky(g) {
            Ok(f) => Ok(SpdSolver { l: f.r.transpose(), r: f.r }),
            Err(Error::NotPositiveDefinite { step }) => Err(Error::RankDeficient { rank: step, expected: g.rows() }),
            Err(e) => Err(e),
        }
    }

    fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let y = forward_substitution(&self.l, b, Diagonal::Stored)?;
        backward_substitution(&self.r, &y, Diagonal::Stored)
    }
}

/// Closed-form alternation. Without a mask the normal matrix is factored
/// once per half-sweep; with one it is rebuilt for every column and row.
fn closed_form(a: &Matrix, mask: Option<&Matrix>, k: usize, cfg: &AlsConfig) -> Result<FactorPair> {
    check_k(k, cfg.bias)?;
    cfg.validate()?;
    let (m, n) = a.shape();
    let lay = Layout::new(k, cfg.bias);
    let mut r = rng(cfg.seed);
    let scale = match mean_scale(a, mask, k) {
        s if s > 0.0 => s,
        _ => 1.0,
    };
    let (mut w, mut z) = random_factors(&mut r, m, n, lay.d, scale);
    lay.pin(&mut w, &mut z);
    let mut history = Vec::with_capacity(cfg.max_iter + 1);
    record(&mut history, objective(a, mask, &w, &z, cfg))?;
    let all_rows: Vec<usize> = (0..m).collect();
    let all_cols: Vec<usize> = (0..n).collect();

    for _ in 0..cfg.max_iter {
        let zf = lay.z_free();
        let shared = match mask {
            None => Some(SpdSolver::new(&normal_matrix(&w, &all_rows, zf.clone(), cfg.lambda_z))?),
            Some(_) => None,
        };
        for j in 0..n {
            let obs_j: Vec<usize>;
            let obs: &[usize] = match mask {
                None => &all_rows,
                Some(_) => {
                    obs_j = (0..m).filter(|&i| is_obs(mask, i, j)).collect();
                    &obs_j
                }
            };
            let local;
            let solver = match &shared {
                Some(s) => s,
                None => {
                    local = SpdSolver::new(&normal_matrix(&w, obs, zf.clone(), cfg.lambda_z))?;
                    &local
                }
            };
            let sol = solver.solve(&normal_rhs(&w, obs, zf.clone(), lay.z_offset(), |i| a[(i, j)]))?;
            for (c, v) in zf.clone().zip(sol) {
                z[(c, j)] = v;
            }
        }

        let zt = z.transpose();
        let wf = lay.w_free();
        let shared = match mask {
            None => Some(SpdSolver::new(&normal_matrix(&zt, &all_cols, wf.clone(), cfg.lambda_w))?),
            Some(_) => None,
        };
        for i in 0..m {
            let obs_i: Vec<usize>;
            let obs: &[usize] = match mask {
                None => &all_cols,
                Some(_) => {
                    obs_i = (0..n).filter(|&j| is_obs(mask, i, j)).collect();
                    &obs_i
                }
            };
            let local;
            let solver = match &shared {
                Some(s) => s,
                None => {
                    local = SpdSolver::new(&normal_matrix(&zt, obs, wf.clone(), cfg.lambda_w))?;
                    &local
                }
            };
            let sol = solver.solve(&normal_rhs(&zt, obs, wf.clone(), lay.w_offset(), |j| a[(i, j)]))?;
            for (c, v) in wf.clone().zip(sol) {
                w[(i, c)] = v;
            }
        }

        let prev = *history.last().unwrap();
        record(&mut history, objective(a, mask, &w, &z, cfg))?;
        if converged(prev, *history.last().unwrap(), cfg.tol) {
            break;
        }
    }
    Ok(FactorPair { w, z, k, bias: cfg.bias, loss_history: history })
}

/// Regularized ALS, `Z = (WᵀW + λ_z I)⁻¹WᵀA` then `W = AZᵀ(ZZᵀ + λ_w I)⁻¹`.
/// With zero regularization a singular update system is reported as
/// `RankDeficient`.
pub fn als(a: &Matrix, k: usize, cfg: &AlsConfig) -> Result<FactorPair> {
    a.check_finite()?;
    closed_form(a, None, k, cfg)
}

/// ALS over the observed cells only, one normal system per column and row.
pub fn als_masked(data: &MaskedMatrix, k: usize, cfg: &AlsConfig) -> Result<FactorPair> {
    closed_form(&data.a, Some(&data.mask), k, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdMode {
    /// Column-wise then row-wise steps on the full loss.
    Full,
    /// Steps on single-cell losses, visiting cells in a seeded order.
    Stochastic,
}

fn normalized_step(x: &mut [f64], g: &[f64], eta: f64) {
    let ng = norm2(g);
    if ng == 0.0 || eta == 0.0 {
        return;
    }
    for (xi, gi) in x.iter_mut().zip(g) {
        *xi -= eta * gi / ng;
    }
}

fn col_dot(w: &Matrix, i: usize, z: &Matrix, j: usize) -> f64 {
    w.row(i).iter().enumerate().map(|(c, x)| x * z[(c, j)]).sum()
}

/// Normalized gradient descent, `x ← x − η·∇L/‖∇L‖`, on the columns of
/// `Z` and the rows of `W`.
pub fn als_gd(a: &Matrix, k: usize, cfg: &AlsConfig, mode: GdMode) -> Result<FactorPair> {
    a.check_finite()?;
    check_k(k, cfg.bias)?;
    cfg.validate()?;
    let (m, n) = a.shape();
    let lay = Layout::new(k, cfg.bias);
    let (zf, wf) = (lay.z_free(), lay.w_free());
    let mut r = rng(cfg.seed);
    let scale = match mean_scale(a, None, k) {
        s if s > 0.0 => s,
        _ => 1.0,
    };
    let (mut w, mut z) = random_factors(&mut r, m, n, lay.d, scale);
    lay.pin(&mut w, &mut z);
    let mut history = Vec::with_capacity(cfg.max_iter + 1);
    record(&mut history, objective(a, None, &w, &z, cfg))?;
    let mut cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();

    for _ in 0..cfg.max_iter {
        match mode {
            GdMode::Full => {
                for j in 0..n {
                    let res: Vec<f64> = (0..m).map(|i| col_dot(&w, i, &z, j) - a[(i, j)]).collect();
                    let g: Vec<f64> = zf
                        .clone()
                        .map(|c| 2.0 * (0..m).map(|i| w[(i, c)] * res[i]).sum::<f64>() + 2.0 * cfg.lambda_z * z[(c, j)])
                        .collect();
                    let mut x: Vec<f64> = zf.clone().map(|c| z[(c, j)]).collect();
                    normalized_step(&mut x, &g, cfg.eta_z);
                    for (c, v) in zf.clone().zip(x) {
                        z[(c, j)] = v;
                    }
                }
                for i in 0..m {
                    let res: Vec<f64> = (0..n).map(|j| col_dot(&w, i, &z, j) - a[(i, j)]).collect();
                    let g: Vec<f64> = wf
                        .clone()
                        .map(|c| 2.0 * (0..n).map(|j| z[(c, j)] * res[j]).sum::<f64>() + 2.0 * cfg.lambda_w * w[(i, c)])
                        .collect();
                    normalized_step(&mut w.row_mut(i)[wf.clone()], &g, cfg.eta_w);
                }
            }
            GdMode::Stochastic => {
                cells.shuffle(&mut r);
                for &(i, j) in &cells {
                    let e = col_dot(&w, i, &z, j) - a[(i, j)];
                    let g: Vec<f64> = zf.clone().map(|c| 2.0 * e * w[(i, c)] + 2.0 * cfg.lambda_z * z[(c, j)]).collect();
                    let mut x: Vec<f64> = zf.clone().map(|c| z[(c, j)]).collect();
                    normalized_step(&mut x, &g, cfg.eta_z);
                    for (c, v) in zf.clone().zip(x) {
                        z[(c, j)] = v;
                    }
                    let e = col_dot(&w, i, &z, j) - a[(i, j)];
                    let g: Vec<f64> = wf.clone().map(|c| 2.0 * e * z[(c, j)] + 2.0 * cfg.lambda_w * w[(i, c)]).collect();
                    normalized_step(&mut w.row_mut(i)[wf.clone()], &g, cfg.eta_w);
                }
            }
        }
        let prev = *history.last().unwrap();
        record(&mut history, objective(a, None, &w, &z, cfg))?;
        if converged(prev, *history.last().unwrap(), cfg.tol) {
            break;
        }
    }
    Ok(FactorPair { w, z, k, bias: cfg.bias, loss_history: history })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NmfInit {
    /// Uniform entries scaled by `√(mean(A)/k)`.
    Random,
    /// k-means on the columns of `A`; `Z` is the scaled cluster indicator.
    Clustering,
    /// `k` pivot columns of `A` for `W` and `k` pivot rows for `Z`.
    Subset,
    /// Nonnegative part of each leading singular triplet.
    SvdBased,
}

fn check_nonnegative(a: &Matrix) -> Result<()> {
    a.check_finite()?;
    if a.as_slice().iter().any(|&x| x < 0.0) {
        return Err(Error::NegativeInput);
    }
    Ok(())
}

fn kmeans_columns(a: &Matrix, k: usize, r: &mut TestRng) -> (Matrix, Vec<usize>) {
    let (m, n) = a.shape();
    let mut centers = a.select_cols(&index::sample(r, n, k).into_vec());
    let mut assign = vec![usize::MAX; n];
    for _ in 0..100 {
        let mut changed = false;
        for j in 0..n {
            let best = (0..k)
                .map(|c| (0..m).map(|i| (a[(i, j)] - centers[(i, c)]).powi(2)).sum::<f64>())
                .enumerate()
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .map(|(c, _)| c)
                .unwrap();
            if assign[j] != best {
                assign[j] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        for c in 0..k {
            let members: Vec<usize> = (0..n).filter(|&j| assign[j] == c).collect();
            if members.is_empty() {
                continue;
            }
            for i in 0..m {
                centers[(i, c)] = members.iter().map(|&j| a[(i, j)]).sum::<f64>() / members.len() as f64;
            }
        }
    }
    (centers, assign)
}

fn positive_part(v: &[f64], sign: f64) -> Vec<f64> {
    v.iter().map(|x| (sign * x).max(0.0)).collect()
}

/// Nonnegative starting factors for [`nmf`].
pub fn nmf_init(a: &Matrix, k: usize, init: NmfInit, seed: u64) -> Result<(Matrix, Matrix)> {
    check_nonnegative(a)?;
    check_k(k, false)?;
    let (m, n) = a.shape();
    let mut r = rng(seed);
    let scale = mean_scale(a, None, k);
    match init {
        NmfInit::Random => Ok(random_factors(&mut r, m, n, k, scale)),
        NmfInit::Clustering => {
            if k > n {
                return Err(Error::InvalidArgument(format!("k={k} exceeds {n} columns")));
            }
            let (w, assign) = kmeans_columns(a, k, &mut r);
            let mut z = Matrix::zeros(k, n);
            for (j, &c) in assign.iter().enumerate() {
                let wc = w.col(c);
                let nn = wc.iter().map(|x| x * x).sum::<f64>();
                let fit = if nn > 0.0 { (0..m).map(|i| wc[i] * a[(i, j)]).sum::<f64>() / nn } else { 0.0 };
                z[(c, j)] = fit.max(0.0);
            }
            Ok((w, z))
        }
        NmfInit::Subset => {
            if k > m.min(n) {
                return Err(Error::InvalidArgument(format!("k={k} exceeds min({m}, {n})")));
            }
            let (fc, _) = cpqr(a, CpqrMode::Practical, Shape::Reduced)?;
            let (fr, _) = cpqr(&a.transpose(), CpqrMode::Practical, Shape::Reduced)?;
            let mut w = a.select_cols(&fc.p.indices()[..k]);
            let mut z = a.select_rows(&fr.p.indices()[..k]);
            let prod = (&w * &z).frobenius();
            if prod > 0.0 {
                let s = (a.frobenius() / prod).sqrt();
                w = w.scale(s);
                z = z.scale(s);
            }
            Ok((w, z))
        }
        NmfInit::SvdBased => {
            let s = svd(a, Shape::Reduced)?;
            let (mut w, mut z) = random_factors(&mut r, m, n, k, scale);
            for i in 0..k.min(s.rank) {
                let (u, v) = (s.u.col(i), s.v.col(i));
                let (up, vp) = (positive_part(&u, 1.0), positive_part(&v, 1.0));
                let (un, vn) = (positive_part(&u, -1.0), positive_part(&v, -1.0));
                let (x, y) = if norm2(&up) * norm2(&vp) >= norm2(&un) * norm2(&vn) { (up, vp) } else { (un, vn) };
                let root = s.sigma[i].sqrt();
                w.set_col(i, &x.iter().map(|t| root * t).collect::<Vec<_>>());
                z.set_row(i, &y.iter().map(|t| root * t).collect::<Vec<_>>());
            }
            Ok((w, z))
        }
    }
}

/// Multiplicative updates, interleaved so that row `k` of `Z` and then
/// column `k` of `W` are refreshed before moving to `k + 1`. Numerators
/// subtract the regularization term and are clamped at zero.
pub fn nmf(a: &Matrix, k: usize, cfg: &AlsConfig, init: NmfInit) -> Result<FactorPair> {
    const EPS: f64 = 1e-9;
    check_nonnegative(a)?;
    cfg.validate()?;
    if cfg.bias {
        return Err(Error::InvalidArgument("bias terms are not supported by nmf".into()));
    }
    let (m, n) = a.shape();
    let (mut w, mut z) = nmf_init(a, k, init, cfg.seed)?;
    // multiplicative updates never move an exact zero
    let floor = 1e-3 * mean_scale(a, None, k);
    for x in w.as_mut_slice().iter_mut().chain(z.as_mut_slice().iter_mut()) {
        if *x == 0.0 {
            *x = floor;
        }
    }
    let mut history = Vec::with_capacity(cfg.max_iter + 1);
    record(&mut history, objective(a, None, &w, &z, cfg))?;
    if history[0] == 0.0 {
        return Ok(FactorPair { w, z, k, bias: false, loss_history: history });
    }

    for _ in 0..cfg.max_iter {
        for kk in 0..k {
            // row kk of Z: (WᵀA)[kk, :] and (WᵀW)[kk, :]·Z
            let wk = w.col(kk);
            let wtw: Vec<f64> = (0..k).map(|c| (0..m).map(|i| wk[i] * w[(i, c)]).sum()).collect();
            for j in 0..n {
                let num = (0..m).map(|i| wk[i] * a[(i, j)]).sum::<f64>() - cfg.lambda_z * z[(kk, j)];
                let den = (0..k).map(|c| wtw[c] * z[(c, j)]).sum::<f64>() + EPS;
                z[(kk, j)] *= num.max(0.0) / den;
            }
            // column kk of W: (AZᵀ)[:, kk] and W·(ZZᵀ)[:, kk]
            let zk = z.row(kk).to_vec();
            let zzt: Vec<f64> = (0..k).map(|c| z.row(c).iter().zip(&zk).map(|(x, y)| x * y).sum()).collect();
            for i in 0..m {
                let num = a.row(i).iter().zip(&zk).map(|(x, y)| x * y).sum::<f64>() - cfg.lambda_w * w[(i, kk)];
                let den = w.row(i).iter().zip(&zzt).map(|(x, y)| x * y).sum::<f64>() + EPS;
                w[(i, kk)] *= num.max(0.0) / den;
            }
        }
        let prev = *history.last().unwrap();
        record(&mut history, objective(a, None, &w, &z, cfg))?;
        if converged(prev, *history.last().unwrap(), cfg.tol) {
            break;
        }
    }
    Ok(FactorPair { w, z, k, bias: false, loss_history: history })
}
