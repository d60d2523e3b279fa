//! Stage-wise action of a 2×2 factorization on the unit circle.
//!
//! Applying the factors of `A` right to left moves the circle through a
//! sequence of intermediate shapes; the last stage is always `A` applied
//! to the circle.

use std::f64::consts::TAU;
use std::fmt::Write;

use crate::eigen::{evd, spectral};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, Shape};
use crate::svd::{polar, svd, PolarSide};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    /// `X·Λ·X⁻¹`.
    Evd,
    /// `Q·Λ·Qᵀ`.
    Spectral,
    /// `U·Σ·Vᵀ`.
    Svd,
    /// `Q_l·(V·Σ·Vᵀ)`.
    Polar,
}

impl TransformKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "evd" => Some(TransformKind::Evd),
            "spectral" => Some(TransformKind::Spectral),
            "svd" => Some(TransformKind::Svd),
            "polar" => Some(TransformKind::Polar),
            _ => None,
        }
    }
}

/// Points and tracked vectors after the first `k` factors are applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    /// Name of the factor applied last, `"input"` for the initial stage.
    pub label: String,
    /// Product of the factors applied so far.
    pub cumulative: Matrix,
    /// `2 × samples`, images of the unit circle.
    pub circle: Matrix,
    /// Images of `e₁`, `e₂` as columns.
    pub basis: Matrix,
    /// Images of the decomposition's own input-side vectors (columns of
    /// `X`, `Q` or `V`) as columns.
    pub tracked: Matrix,
}

fn unit_circle(samples: usize) -> Matrix {
    Matrix::from_fn(2, samples, |i, j| {
        let t = TAU * j as f64 / samples as f64;
        if i == 0 { t.cos() } else { t.sin() }
    })
}

/// Factors of `A` in application order (rightmost first), plus the input
/// side vectors to track.
fn factors(a: &Matrix, kind: TransformKind) -> Result<(Vec<(&'static str, Matrix)>, Matrix)> {
    match kind {
        TransformKind::Evd => {
            let f = evd(a)?;
            let xinv = crate::lu::inverse(&f.x)?;
            Ok((vec![("X^-1", xinv), ("Lambda", Matrix::from_diag(&f.lambda)), ("X", f.x.clone())], f.x))
        }
        TransformKind::Spectral => {
            if !a.is_symmetric(Tolerance::default().rel) {
                return Err(Error::NotSymmetric);
            }
            let f = spectral(a)?;
            Ok((vec![("Q^T", f.q.transpose()), ("Lambda", Matrix::from_diag(&f.lambda)), ("Q", f.q.clone())], f.q))
        }
        TransformKind::Svd => {
            let f = svd(a, Shape::Full)?;
            Ok((vec![("V^T", f.v.transpose()), ("Sigma", Matrix::from_diag(&f.sigma)), ("U", f.u)], f.v))
        }
        TransformKind::Polar => {
            let f = svd(a, Shape::Full)?;
            let p = polar(a, PolarSide::Left)?;
            let stages = vec![("V^T", f.v.transpose()), ("Sigma", Matrix::from_diag(&f.sigma)), ("V", f.v.clone()), ("Q_l", p.q)];
            Ok((stages, f.v))
        }
    }
}

/// Stage data for `A` under `kind`, with the circle sampled at `samples`
/// equally spaced angles.
pub fn transform_stages(a: &Matrix, kind: TransformKind, samples: usize) -> Result<Vec<Stage>> {
    if a.shape() != (2, 2) {
        return Err(Error::DimensionMismatch(format!("expected a 2x2 matrix, got {}x{}", a.rows(), a.cols())));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    a.check_finite()?;
    let (fs, tracked) = factors(a, kind)?;
    let circle = unit_circle(samples);
    let mut cumulative = Matrix::identity(2);
    let mut out = vec![Stage {
        label: "input".into(),
        cumulative: cumulative.clone(),
        circle: circle.clone(),
        basis: Matrix::identity(2),
        tracked: tracked.clone(),
    }];
    for (label, f) in fs {
        cumulative = &f * &cumulative;
        out.push(Stage {
            label: label.into(),
            circle: &cumulative * &circle,
            basis: cumulative.clone(),
            tracked: &cumulative * &tracked,
            cumulative: cumulative.clone(),
        });
    }
    Ok(out)
}

/// One CSV block per stage under a shared header, blocks separated by a
/// blank line. Values use 17 significant digits.
pub fn stages_csv(stages: &[Stage]) -> String {
    let mut s = String::from("stage,label,kind,index,x,y\n");
    for (k, st) in stages.iter().enumerate() {
        if k > 0 {
            s.push('\n');
        }
        let mut block = |kind: &str, m: &Matrix| {
            for j in 0..m.cols() {
                let _ = writeln!(s, "{k},{},{kind},{j},{:.16e},{:.16e}", st.label, m[(0, j)], m[(1, j)]);
            }
        };
        block("circle", &st.circle);
        block("basis", &st.basis);
        block("tracked", &st.tracked);
    }
    s
}
