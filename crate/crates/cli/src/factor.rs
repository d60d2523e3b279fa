//! `factor`: run one decomposition and report how well it reproduces the input.

use std::fmt::Write as _;

use clap::ValueEnum;
use matdec::cholesky::{cholesky, semidefinite_rank_revealing};
use matdec::eigen::{evd, schur, spectral};
use matdec::flops::{flops, FlopOp};
use matdec::interp::{cr, cur, id_column, rank_decomposition, CurMode, IdMode};
use matdec::lu::{ldu, lu_with, Pivoting};
use matdec::qr::{cpqr_with, lq, qr_with, CpqrMode, Method};
use matdec::reduce::{bidiagonalize, hessenberg, tridiagonalize, BidiagStrategy};
use matdec::svd::{polar, svd_with, PolarSide};
use matdec::utv::{utv, UtvKind};
use matdec::wedderburn::{form1, wedderburn_run, CoordinateSupplier};
use matdec::{Matrix, Permutation, Shape, Tolerance};

use crate::error::CliError;
use crate::io::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Lu,
    Ldu,
    Cholesky,
    Semidefinite,
    Qr,
    Cpqr,
    Lq,
    Rplq,
    Ulv,
    Urv,
    Complete,
    Cr,
    Rank,
    Cur,
    Id,
    Hessenberg,
    Tridiagonal,
    Bidiagonal,
    Schur,
    Spectral,
    Evd,
    Svd,
    Polar,
    Wedderburn,
}

/// Strategy choice whose meaning depends on the algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pivot {
    None,
    Partial,
    Complete,
    Rook,
    Simple,
    Practical,
    Optimal,
    Cpqr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QrMethod {
    Cgs,
    Mgs,
    Householder,
    Givens,
    GolubKahan,
    Lhc,
    ThreeStep,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Full,
    Reduced,
}

#[derive(Debug, Clone)]
pub struct FactorOptions {
    pub algo: Algo,
    pub pivot: Option<Pivot>,
    pub method: Option<QrMethod>,
    pub shape: ShapeArg,
    pub rank_tol: Option<f64>,
}

/// Everything the report and the factor files are built from.
#[derive(Debug, Clone)]
pub struct Report {
    pub algo: Algo,
    pub input_shape: (usize, usize),
    pub factors: Vec<(&'static str, Matrix)>,
    pub reconstruction: Matrix,
    /// Names of factors with orthonormal columns.
    pub orthogonal: Vec<&'static str>,
    pub rank: Option<usize>,
    pub pivot_log: Vec<String>,
    pub flops: Option<f64>,
    pub values: Vec<(&'static str, Vec<f64>)>,
    pub indices: Vec<(&'static str, Vec<usize>)>,
}

impl Report {
    fn new(algo: Algo, a: &Matrix, reconstruction: Matrix) -> Self {
        Report {
            algo,
            input_shape: a.shape(),
            factors: vec![],
            reconstruction,
            orthogonal: vec![],
            rank: None,
            pivot_log: vec![],
            flops: None,
            values: vec![],
            indices: vec![],
        }
    }

    fn factor(mut self, name: &'static str, m: Matrix) -> Self {
        self.factors.push((name, m));
        self
    }

    fn orth(mut self, name: &'static str, m: Matrix) -> Self {
        self.orthogonal.push(name);
        self.factor(name, m)
    }

    fn perm(self, name: &'static str, p: &Permutation) -> Self {
        self.factor(name, p.to_matrix())
    }

    fn rank(mut self, r: usize) -> Self {
        self.rank = Some(r);
        self
    }

    fn values(mut self, name: &'static str, v: Vec<f64>) -> Self {
        self.values.push((name, v));
        self
    }

    fn indices(mut self, name: &'static str, v: Vec<usize>) -> Self {
        self.indices.push((name, v));
        self
    }

    fn flops(mut self, f: f64) -> Self {
        self.flops = Some(f);
        self
    }

    pub fn rel_residual(&self, a: &Matrix) -> f64 {
        let diff = (a - &self.reconstruction).frobenius();
        let scale = a.frobenius();
        if scale > 0.0 { diff / scale } else { diff }
    }

    pub fn render(&self, a: &Matrix) -> String {
        let mut s = String::new();
        let (m, n) = self.input_shape;
        let _ = writeln!(s, "algo {}", self.algo.to_possible_value().expect("no skipped variants").get_name());
        let _ = writeln!(s, "shape {m}x{n}");
        let _ = writeln!(s, "rel_residual {}", fmt(self.rel_residual(a)));
        for name in &self.orthogonal {
            let (_, q) = self.factors.iter().find(|(f, _)| f == name).expect("orthogonal factor is listed");
            let _ = writeln!(s, "orthogonality {name} {}", fmt(q.orthogonality_defect()));
        }
        match self.rank {
            Some(r) => writeln!(s, "rank {r}"),
            None => writeln!(s, "rank n/a"),
        }
        .ok();
        for (name, v) in &self.values {
            let list: Vec<String> = v.iter().map(|&x| fmt(x)).collect();
            let _ = writeln!(s, "{name} {}", list.join(" "));
        }
        for (name, v) in &self.indices {
            let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{name} {}", list.join(" "));
        }
        for line in &self.pivot_log {
            let _ = writeln!(s, "pivot {line}");
        }
        match self.flops {
            Some(f) => writeln!(s, "flops {}", fmt(f)),
            None => writeln!(s, "flops n/a"),
        }
        .ok();
        for (name, f) in &self.factors {
            let _ = writeln!(s, "factor {name} {}x{}", f.rows(), f.cols());
        }
        s
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn lu_pivoting(p: Option<Pivot>) -> Result<Pivoting, CliError> {
    match p.unwrap_or(Pivot::Partial) {
        Pivot::None => Ok(Pivoting::None),
        Pivot::Partial => Ok(Pivoting::Partial),
        Pivot::Complete => Ok(Pivoting::Complete),
        Pivot::Rook => Ok(Pivoting::Rook),
        other => Err(usage(format!("--pivot={other:?} is not an LU strategy"))),
    }
}

fn reject<T>(opt: Option<T>, flag: &str, algo: Algo) -> Result<(), CliError> {
    match opt {
        Some(_) => Err(usage(format!("{flag} does not apply to --algo={algo:?}"))),
        None => Ok(()),
    }
}

pub fn run(a: &Matrix, opts: &FactorOptions) -> Result<Report, CliError> {
    let algo = opts.algo;
    let tol = match opts.rank_tol {
        Some(t) if t > 0.0 && t.is_finite() => Tolerance::default().with_rank_rel(t),
        Some(t) => return Err(usage(format!("--rank-tol={t} must be positive"))),
        None => Tolerance::default(),
    };
    let shape = match opts.shape {
        ShapeArg::Full => Shape::Full,
        ShapeArg::Reduced => Shape::Reduced,
    };
    if !matches!(algo, Algo::Lu | Algo::Cpqr | Algo::Id) {
        reject(opts.pivot, "--pivot", algo)?;
    }
    if !matches!(algo, Algo::Qr | Algo::Bidiagonal) {
        reject(opts.method, "--method", algo)?;
    }
    let (m, n) = a.shape();
    let report = match algo {
        Algo::Lu => {
            let strategy = lu_pivoting(opts.pivot)?;
            let f = lu_with(a, strategy, &tol)?;
            let rank = f.rank(a.max_abs(), &tol);
            let mut r = Report::new(algo, a, f.reconstruct())
                .factor("L", f.l.clone())
                .factor("U", f.u.clone())
                .perm("P", &f.p)
                .perm("Q", &f.q)
                .rank(rank)
                .flops(flops(FlopOp::LuFactor, n, n));
            r.pivot_log = f.pivot_log.iter().map(|(s, i, j)| format!("step={s} row={i} col={j}")).collect();
            r
        }
        Algo::Ldu => {
            let f = ldu(a)?;
            Report::new(algo, a, f.reconstruct())
                .factor("L", f.l.clone())
                .factor("D", Matrix::from_diag(&f.d))
                .factor("U", f.u.clone())
                .values("d", f.d)
                .flops(flops(FlopOp::LuFactor, n, n))
        }
        Algo::Cholesky => {
            let f = cholesky(a)?;
            Report::new(algo, a, f.reconstruct()).factor("R", f.r).rank(n).flops(flops(FlopOp::Cholesky, n, n))
        }
        Algo::Semidefinite => {
            let f = semidefinite_rank_revealing(a)?;
            Report::new(algo, a, f.reconstruct()).factor("R", f.r_top()).perm("P", &f.p).rank(f.rank)
        }
        Algo::Qr => {
            let method = match opts.method.unwrap_or(QrMethod::Householder) {
                QrMethod::Cgs => Method::Cgs,
                QrMethod::Mgs => Method::Mgs,
                QrMethod::Householder => Method::Householder,
                QrMethod::Givens => Method::Givens,
                other => return Err(usage(format!("--method={other:?} is not a QR method"))),
            };
            let f = qr_with(a, method, shape, &tol)?;
            let mut r = Report::new(algo, a, f.reconstruct()).orth("Q", f.q).factor("R", f.r);
            if method == Method::Householder {
                r = r.flops(flops(FlopOp::HouseholderQr, m, n));
            }
            r
        }
        Algo::Cpqr => {
            let mode = match opts.pivot.unwrap_or(Pivot::Practical) {
                Pivot::Simple => CpqrMode::Simple,
                Pivot::Practical => CpqrMode::Practical,
                other => return Err(usage(format!("--pivot={other:?} is not a CPQR mode"))),
            };
            let (f, rank) = cpqr_with(a, mode, shape, &tol)?;
            let p = f.p.clone();
            Report::new(algo, a, f.reconstruct())
                .orth("Q", f.q)
                .factor("R", f.r)
                .perm("P", &p)
                .indices("column_order", p.indices().to_vec())
                .rank(rank)
        }
        Algo::Lq | Algo::Rplq => {
            let f = lq(a, shape, algo == Algo::Rplq)?;
            let p = f.p.clone();
            Report::new(algo, a, f.reconstruct()).factor("L", f.l).orth("Qt", f.q.transpose()).perm("P", &p).rank(f.rank)
        }
        Algo::Ulv | Algo::Urv | Algo::Complete => {
            let kind = match algo {
                Algo::Ulv => UtvKind::Ulv,
                Algo::Urv => UtvKind::Urv,
                _ => UtvKind::Complete,
            };
            let f = utv(a, kind)?;
            let rank = f.rank;
            Report::new(algo, a, f.reconstruct()).orth("U", f.u).factor("T", f.t).orth("V", f.v).rank(rank)
        }
        Algo::Cr => {
            let f = cr(a)?;
            let rank = f.pivot_cols.len();
            Report::new(algo, a, &f.c * &f.r).factor("C", f.c).factor("R", f.r).indices("columns", f.pivot_cols).rank(rank)
        }
        Algo::Rank => {
            let f = rank_decomposition(a)?;
            let rank = f.d.cols();
            Report::new(algo, a, &f.d * &f.f).factor("D", f.d).factor("F", f.f).rank(rank)
        }
        Algo::Cur => {
            let f = cur(a, CurMode::Deterministic)?;
            let rank = f.rank();
            Report::new(algo, a, f.reconstruct()?)
                .factor("C", f.c)
                .factor("U", f.u)
                .factor("R", f.r)
                .indices("rows", f.i_s)
                .indices("columns", f.j_s)
                .rank(rank)
        }
        Algo::Id => {
            let mode = match opts.pivot.unwrap_or(Pivot::Cpqr) {
                Pivot::Optimal => IdMode::Optimal,
                Pivot::Cpqr => IdMode::Cpqr,
                other => return Err(usage(format!("--pivot={other:?} is not an ID mode"))),
            };
            let f = id_column(a, mode)?;
            let rank = f.j_s.len();
            Report::new(algo, a, f.reconstruct())
                .factor("C", f.c)
                .factor("W", f.w)
                .indices("columns", f.j_s)
                .values("max_coeff", vec![f.max_coeff])
                .rank(rank)
        }
        Algo::Hessenberg | Algo::Tridiagonal => {
            let f = if algo == Algo::Hessenberg { hessenberg(a)? } else { tridiagonalize(a)? };
            Report::new(algo, a, f.reconstruct()).orth("Q", f.q).factor("H", f.h)
        }
        Algo::Bidiagonal => {
            let strategy = match opts.method.unwrap_or(QrMethod::Auto) {
                QrMethod::GolubKahan => BidiagStrategy::GolubKahan,
                QrMethod::Lhc => BidiagStrategy::Lhc,
                QrMethod::ThreeStep => BidiagStrategy::ThreeStep,
                QrMethod::Auto => BidiagStrategy::Auto,
                other => return Err(usage(format!("--method={other:?} is not a bidiagonalization strategy"))),
            };
            let f = bidiagonalize(a, strategy)?;
            let est = f.flops_est;
            Report::new(algo, a, f.reconstruct()).orth("U", f.u).factor("B", f.b).orth("V", f.v).flops(est)
        }
        Algo::Schur => {
            let f = schur(a)?;
            let ev = f.eigenvalues();
            Report::new(algo, a, f.reconstruct()).orth("Q", f.q).factor("T", f.u).values("lambda", ev)
        }
        Algo::Spectral => {
            let f = spectral(a)?;
            let scale = f.lambda.iter().fold(0.0f64, |s, x| s.max(x.abs()));
            let rank = f.lambda.iter().filter(|x| x.abs() > tol.rank_cutoff(n, n, scale)).count();
            Report::new(algo, a, f.reconstruct())
                .orth("Q", f.q.clone())
                .factor("Lambda", Matrix::from_diag(&f.lambda))
                .values("lambda", f.lambda)
                .rank(rank)
        }
        Algo::Evd => {
            let f = evd(a)?;
            let recon = f.reconstruct()?;
            Report::new(algo, a, recon)
                .factor("X", f.x)
                .factor("Lambda", Matrix::from_diag(&f.lambda))
                .values("lambda", f.lambda)
                .values("cond_x", vec![f.cond])
        }
        Algo::Svd => {
            let f = svd_with(a, shape, &tol)?;
            let recon = f.reconstruct();
            let rank = f.rank;
            Report::new(algo, a, recon)
                .orth("U", f.u)
                .factor("Sigma", Matrix::from_diag(&f.sigma))
                .orth("V", f.v)
                .values("sigma", f.sigma)
                .rank(rank)
        }
        Algo::Polar => {
            let f = polar(a, PolarSide::Left)?;
            Report::new(algo, a, f.reconstruct()).orth("Q", f.q).factor("S", f.s)
        }
        Algo::Wedderburn => {
            let seq = wedderburn_run(a, &mut CoordinateSupplier::for_matrix(a))?;
            let f1 = form1(&seq);
            let rank = seq.r();
            Report::new(algo, a, f1.reconstruct())
                .factor("Phi", f1.phi.clone())
                .factor("Omega", Matrix::from_diag(&f1.omega))
                .factor("Psi", f1.psi.clone())
                .factor("U", seq.u())
                .factor("V", seq.v())
                .values("omega", f1.omega)
                .rank(rank)
        }
    };
    Ok(report)
}
