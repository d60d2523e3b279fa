//! Subcommands other than `factor`.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use clap::ValueEnum;
use matdec::als::{als, als_gd, als_masked, nmf, AlsConfig, FactorPair, GdMode, MaskedMatrix, NmfInit};
use matdec::approx::{lstsq_qr, lstsq_svd, lstsq_utv};
use matdec::flops::{bidiag_cost_table, flops, FlopOp};
use matdec::matrix::norm2;
use matdec::random::{random_matrix, random_spd, rng};
use matdec::svd::singular_values;
use matdec::transform::{stages_csv, transform_stages, TransformKind};
use matdec::{Matrix, Tolerance};

use crate::error::CliError;
use crate::io::{self, fmt, Loaded};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    Lu,
    Qr,
    Utv,
    Svd,
}

/// Reads the right-hand side as a single row or a single column.
fn rhs_vector(b: &Matrix) -> Result<Vec<f64>, CliError> {
    match b.shape() {
        (_, 1) => Ok(b.col(0)),
        (1, _) => Ok(b.row(0).to_vec()),
        (r, c) => Err(CliError::Parse(format!("right-hand side must be a vector, got {r}x{c}"))),
    }
}

/// `solve` requires a square system; `lstsq` accepts any shape.
pub fn solve(a: &Matrix, b: &Matrix, method: SolveMethod, square: bool) -> Result<String, CliError> {
    let b = rhs_vector(b)?;
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(CliError::Usage(format!("A is {m}x{n} but the right-hand side has length {}", b.len())));
    }
    if square && m != n {
        return Err(CliError::Usage(format!("solve needs a square matrix, got {m}x{n}; use lstsq")));
    }
    let x = match method {
        SolveMethod::Lu if m != n => return Err(CliError::Usage("--method=lu needs a square matrix".into())),
        SolveMethod::Lu => matdec::lu::solve(a, &b)?,
        SolveMethod::Qr => lstsq_qr(a, &b)?,
        SolveMethod::Utv => lstsq_utv(a, &b)?,
        SolveMethod::Svd => lstsq_svd(a, &b)?,
    };
    let sigma = singular_values(a)?;
    let cutoff = Tolerance::default().rank_cutoff(m, n, sigma.first().copied().unwrap_or(0.0));
    let rank = sigma.iter().filter(|&&s| s > cutoff).count();
    let ax = a.mul_vec(&x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
    // the normal-equation residual vanishes for every least squares solution
    let atr = a.t_mul_vec(&r);

    let mut s = String::new();
    let _ = writeln!(s, "method {}", method.to_possible_value().expect("named").get_name());
    let _ = writeln!(s, "shape {m}x{n}");
    let _ = writeln!(s, "rank {rank}");
    let _ = writeln!(s, "minimal_norm {}", rank < n && matches!(method, SolveMethod::Utv | SolveMethod::Svd));
    let _ = writeln!(s, "residual_norm {}", fmt(norm2(&r)));
    let _ = writeln!(s, "normal_residual_norm {}", fmt(norm2(&atr)));
    let _ = writeln!(s, "solution_norm {}", fmt(norm2(&x)));
    for v in &x {
        let _ = writeln!(s, "x {}", fmt(*v));
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrainAlgo {
    Als,
    AlsGd,
    AlsSgd,
    Nmf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Random,
    Clustering,
    Subset,
    Svd,
}

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub algo: TrainAlgo,
    pub init: Option<InitArg>,
    pub k: usize,
    pub cfg: AlsConfig,
}

pub fn loss_csv(f: &FactorPair) -> String {
    let mut s = String::from("sweep,loss\n");
    for (i, l) in f.loss_history.iter().enumerate() {
        let _ = writeln!(s, "{i},{}", fmt(*l));
    }
    s
}

pub fn train(data: Loaded, opts: &TrainOptions) -> Result<(FactorPair, String), CliError> {
    let mask = data.mask();
    if opts.init.is_some() && opts.algo != TrainAlgo::Nmf {
        return Err(CliError::Usage("--init applies to --algo=nmf only".into()));
    }
    let fit = match (opts.algo, mask) {
        (TrainAlgo::Als, None) => als(&data.values, opts.k, &opts.cfg)?,
        (TrainAlgo::Als, Some(mask)) => als_masked(&MaskedMatrix::new(data.values.clone(), mask)?, opts.k, &opts.cfg)?,
        (_, Some(_)) => {
            return Err(CliError::Usage("missing entries are supported by --algo=als only".into()));
        }
        (TrainAlgo::AlsGd, None) => als_gd(&data.values, opts.k, &opts.cfg, GdMode::Full)?,
        (TrainAlgo::AlsSgd, None) => als_gd(&data.values, opts.k, &opts.cfg, GdMode::Stochastic)?,
        (TrainAlgo::Nmf, None) => {
            let init = match opts.init.unwrap_or(InitArg::Random) {
                InitArg::Random => NmfInit::Random,
                InitArg::Clustering => NmfInit::Clustering,
                InitArg::Subset => NmfInit::Subset,
                InitArg::Svd => NmfInit::SvdBased,
            };
            nmf(&data.values, opts.k, &opts.cfg, init)?
        }
    };
    let filled = data.values.map(|x| if x.is_finite() { x } else { 0.0 });
    let observed = match data.mask() {
        Some(mask) => MaskedMatrix::new(filled, mask)?,
        None => MaskedMatrix::full(filled),
    };
    let pred = fit.product();
    let mut s = String::new();
    let _ = writeln!(s, "algo {}", opts.algo.to_possible_value().expect("named").get_name());
    let _ = writeln!(s, "shape {}x{}", data.values.rows(), data.values.cols());
    let _ = writeln!(s, "observed {}", observed.observed_count());
    let _ = writeln!(s, "k {}", opts.k);
    let _ = writeln!(s, "seed {}", opts.cfg.seed);
    let _ = writeln!(s, "sweeps {}", fit.sweeps());
    let _ = writeln!(s, "loss {}", fmt(fit.loss()));
    let _ = writeln!(s, "rmse_observed {}", fmt(observed.rmse(&pred, true)));
    Ok((fit, s))
}

pub fn transform_demo(a: &Matrix, kind: TransformKind, samples: usize) -> Result<String, CliError> {
    Ok(stages_csv(&transform_stages(a, kind, samples)?))
}

/// Row counts `n, n + step, …, 3n` so that `m = 5n/3` lands on the grid
/// whenever `3 | n` and `step | 2n/3`.
fn row_grid(n: usize, step: usize) -> Vec<usize> {
    if n == 0 {
        return vec![0];
    }
    (n..=3 * n).step_by(step.max(1)).collect()
}

pub fn bench(ns: &[usize], step: Option<usize>, timing: bool, seed: u64) -> Result<String, CliError> {
    let mut s = String::new();
    let _ = writeln!(s, "# analytic flops (m = 2n for rectangular operations)");
    let _ = writeln!(s, "op,m,n,flops");
    for &n in ns {
        for op in FlopOp::ALL {
            let m = 2 * n;
            let _ = writeln!(s, "{op},{m},{n},{}", fmt(flops(op, m, n)));
        }
    }
    let _ = writeln!(s, "\n# bidiagonalization costs");
    let _ = writeln!(s, "m,n,m_over_n,golub_kahan,lhc,three_step,lhc_cheaper,crossover");
    for &n in ns {
        let step = step.unwrap_or((n / 6).max(1));
        for row in bidiag_cost_table(n, &row_grid(n, step)) {
            let ratio = if row.n > 0 { row.m as f64 / row.n as f64 } else { 0.0 };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                row.m,
                row.n,
                fmt(ratio),
                fmt(row.golub_kahan),
                fmt(row.lhc),
                fmt(row.three_step),
                row.lhc_cheaper,
                row.crossover
            );
        }
    }
    if timing {
        let _ = writeln!(s, "\n# wall time");
        let _ = writeln!(s, "op,n,seconds");
        let mut r = rng(seed);
        for &n in ns.iter().filter(|&&n| n > 0) {
            let a = random_matrix(&mut r, n, n);
            let spd = random_spd(&mut r, n);
            let mut time = |name: &str, f: &dyn Fn() -> matdec::Result<()>| -> Result<(), CliError> {
                let t = Instant::now();
                f()?;
                let _ = writeln!(s, "{name},{n},{}", fmt(t.elapsed().as_secs_f64()));
                Ok(())
            };
            time("lu_factor", &|| matdec::lu::lu(&a, matdec::lu::Pivoting::Partial).map(drop))?;
            time("cholesky", &|| matdec::cholesky::cholesky(&spd).map(drop))?;
            time("householder_qr", &|| {
                matdec::qr::householder_qr(&a);
                Ok(())
            })?;
            time("svd", &|| matdec::svd::svd(&a, matdec::Shape::Full).map(drop))?;
        }
    }
    Ok(s)
}

pub fn write_factors(dir: &Path, factors: &[(&str, Matrix)]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    for (name, m) in factors {
        io::write_matrix(&dir.join(format!("{name}.mtx")), m)?;
    }
    Ok(())
}
