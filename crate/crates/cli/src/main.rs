use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use matdec::als::AlsConfig;
use matdec::transform::TransformKind;

mod commands;
mod error;
mod factor;
mod io;

use commands::{InitArg, SolveMethod, TrainAlgo, TrainOptions};
use error::CliError;
use factor::{Algo, FactorOptions, Pivot, QrMethod, ShapeArg};

#[derive(Parser)]
#[command(name = "matdec", version, about = "Dense matrix decompositions: factor, solve, train and inspect")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a matrix and report residual, orthogonality, rank and flops.
    Factor(FactorArgs),
    /// Solve a square system A·x = b.
    Solve(SolveArgs),
    /// Least squares solution of A·x ≈ b.
    Lstsq(SolveArgs),
    /// Fit A ≈ W·Z by ALS, gradient descent or NMF.
    Train(TrainArgs),
    /// Emit the stage-wise action of a 2×2 factorization on the unit circle.
    TransformDemo(DemoArgs),
    /// Print analytic flop tables and measured wall times.
    Bench(BenchArgs),
}

#[derive(Args)]
struct FactorArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    /// LU: none|partial|complete|rook; CPQR: simple|practical; ID: optimal|cpqr.
    #[arg(long, value_enum)]
    pivot: Option<Pivot>,
    /// QR: cgs|mgs|householder|givens; bidiagonal: golub-kahan|lhc|three-step|auto.
    #[arg(long, value_enum)]
    method: Option<QrMethod>,
    #[arg(long, value_enum, default_value = "reduced")]
    shape: ShapeArg,
    #[arg(long = "in")]
    input: PathBuf,
    /// Directory for one MatrixMarket file per factor plus report.txt.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Relative rank cutoff, scaled by max(m, n) and the largest pivot or singular value.
    #[arg(long)]
    rank_tol: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Right-hand side, a single row or column.
    #[arg(long)]
    rhs: PathBuf,
    #[arg(long, value_enum)]
    method: Option<SolveMethod>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "als")]
    algo: TrainAlgo,
    /// NMF initialization.
    #[arg(long, value_enum)]
    init: Option<InitArg>,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    lambda_w: f64,
    #[arg(long, default_value_t = 0.1)]
    lambda_z: f64,
    /// Step size for both factors in gradient modes.
    #[arg(long, default_value_t = 0.01)]
    eta: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, env = "MATDEC_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    bias: bool,
    /// Directory for W.mtx, Z.mtx and loss.csv.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = parse_kind)]
    decomposition: TransformKind,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Column counts for the tables.
    #[arg(long, value_delimiter = ',', default_values_t = [30usize, 60])]
    n: Vec<usize>,
    /// Row-count step in the bidiagonalization table (default n/6).
    #[arg(long)]
    m_step: Option<usize>,
    /// Skip wall-time measurements, making the output deterministic.
    #[arg(long)]
    no_timing: bool,
    #[arg(long, env = "MATDEC_SEED", default_value_t = 0)]
    seed: u64,
}

fn parse_kind(s: &str) -> Result<TransformKind, String> {
    TransformKind::parse(s).ok_or_else(|| format!("expected evd, spectral, svd or polar, got {s:?}"))
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Factor(args) => {
            let a = io::read_dense(&args.input)?;
            let opts = FactorOptions {
                algo: args.algo,
                pivot: args.pivot,
                method: args.method,
                shape: args.shape,
                rank_tol: args.rank_tol,
            };
            let report = factor::run(&a, &opts)?;
            let text = report.render(&a);
            if let Some(dir) = &args.out_dir {
                commands::write_factors(dir, &report.factors)?;
                io::write_file(&dir.join("report.txt"), &text)?;
            }
            Ok(text)
        }
        Command::Solve(args) => {
            let (a, b) = (io::read_dense(&args.input)?, io::read_dense(&args.rhs)?);
            commands::solve(&a, &b, args.method.unwrap_or(SolveMethod::Lu), true)
        }
        Command::Lstsq(args) => {
            let (a, b) = (io::read_dense(&args.input)?, io::read_dense(&args.rhs)?);
            commands::solve(&a, &b, args.method.unwrap_or(SolveMethod::Svd), false)
        }
        Command::Train(args) => {
            let data = io::read_matrix(&args.input)?;
            let cfg = AlsConfig {
                lambda_w: args.lambda_w,
                lambda_z: args.lambda_z,
                eta_w: args.eta,
                eta_z: args.eta,
                max_iter: args.max_iter,
                tol: args.tol,
                seed: args.seed,
                bias: args.bias,
            };
            let opts = TrainOptions { algo: args.algo, init: args.init, k: args.k, cfg };
            let (fit, text) = commands::train(data, &opts)?;
            if let Some(dir) = &args.out_dir {
                commands::write_factors(dir, &[("W", fit.w.clone()), ("Z", fit.z.clone())])?;
                io::write_file(&dir.join("loss.csv"), &commands::loss_csv(&fit))?;
            }
            Ok(text)
        }
        Command::TransformDemo(args) => {
            let a = io::read_dense(&args.input)?;
            let csv = commands::transform_demo(&a, args.decomposition, args.samples)?;
            match &args.out {
                Some(path) => {
                    io::write_file(path, &csv)?;
                    Ok(String::new())
                }
                None => Ok(csv),
            }
        }
        Command::Bench(args) => commands::bench(&args.n, args.m_step, !args.no_timing, args.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
