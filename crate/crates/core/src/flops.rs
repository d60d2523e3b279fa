//! Leading-order floating point operation counts.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlopOp {
    LuFactor,
    /// Factorization plus forward and backward substitution.
    LuSolve,
    /// Inverse from triangular inverses.
    Inverse,
    /// Inverse from `n` separate solves.
    InverseViaSolves,
    Cholesky,
    CholeskyRankOneUpdate,
    HouseholderQr,
    GolubKahan,
    /// Extra cost of forming `U` and `V` explicitly after Golub-Kahan.
    BidiagonalAccumulation,
    Lhc,
    ThreeStep,
}

impl FlopOp {
    pub const ALL: [FlopOp; 11] = [
        FlopOp::LuFactor,
        FlopOp::LuSolve,
        FlopOp::Inverse,
        FlopOp::InverseViaSolves,
        FlopOp::Cholesky,
        FlopOp::CholeskyRankOneUpdate,
        FlopOp::HouseholderQr,
        FlopOp::GolubKahan,
        FlopOp::BidiagonalAccumulation,
        FlopOp::Lhc,
        FlopOp::ThreeStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FlopOp::LuFactor => "lu_factor",
            FlopOp::LuSolve => "lu_solve",
            FlopOp::Inverse => "inverse",
            FlopOp::InverseViaSolves => "inverse_via_solves",
            FlopOp::Cholesky => "cholesky",
            FlopOp::CholeskyRankOneUpdate => "cholesky_rank_one_update",
            FlopOp::HouseholderQr => "householder_qr",
            FlopOp::GolubKahan => "golub_kahan_bidiag",
            FlopOp::BidiagonalAccumulation => "bidiag_accumulate",
            FlopOp::Lhc => "lhc_bidiag",
            FlopOp::ThreeStep => "three_step_bidiag",
        }
    }
}

impl fmt::Display for FlopOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FlopOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        FlopOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown flop operation {s:?}")))
    }
}

/// Flop count for `op` on an `m × n` input. Square operations use `n` and
/// ignore `m`.
pub fn flops(op: FlopOp, m: usize, n: usize) -> f64 {
    let (m, n) = (m as f64, n as f64);
    match op {
        FlopOp::LuFactor => 2.0 / 3.0 * n.powi(3),
        FlopOp::LuSolve => 2.0 / 3.0 * n.powi(3) + 2.0 * n * n,
        FlopOp::Inverse => 2.0 * n.powi(3),
        FlopOp::InverseViaSolves => 8.0 / 3.0 * n.powi(3),
        FlopOp::Cholesky => n.powi(3) / 3.0,
        FlopOp::CholeskyRankOneUpdate => 6.0 * n * n,
        FlopOp::HouseholderQr => 2.0 * m * n * n - 2.0 / 3.0 * n.powi(3),
        FlopOp::GolubKahan => 4.0 * m * n * n - 4.0 / 3.0 * n.powi(3),
        FlopOp::BidiagonalAccumulation => 4.0 * m * m * n - 2.0 * m * n * n + 2.0 * n.powi(3),
        FlopOp::Lhc => 2.0 * m * n * n + 2.0 * n.powi(3),
        FlopOp::ThreeStep => {
            2.0 * m * n * n + 2.0 * m * m * n - 2.0 / 3.0 * m.powi(3) - 2.0 / 3.0 * n.powi(3)
        }
    }
}

/// Number of Golub-Kahan steps taken before switching to QR plus
/// Golub-Kahan on the trailing block in three-step bidiagonalization.
///
/// Minimizes `GK(m,n) − GK(m−k,n−k) + LHC(m−k,n−k)` over integer
/// `0 <= k <= n`; the continuous minimizer is `k = 2n − m`.
pub fn three_step_switch(m: usize, n: usize) -> usize {
    let cost = |k: usize| {
        let (a, b) = (m - k, n - k);
        flops(FlopOp::GolubKahan, m, n) - flops(FlopOp::GolubKahan, a, b) + flops(FlopOp::Lhc, a, b)
    };
    (0..=n).min_by(|&x, &y| cost(x).total_cmp(&cost(y))).unwrap_or(0)
}

/// One row of the bidiagonalization cost comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct BidiagCostRow {
    pub m: usize,
    pub n: usize,
    pub golub_kahan: f64,
    pub lhc: f64,
    pub three_step: f64,
    /// `LHC < Golub-Kahan` according to the formulas.
    pub lhc_cheaper: bool,
    /// First row of the table at or beyond `m = (5/3)·n`.
    pub crossover: bool,
}

/// Cost table for fixed `n` over the given row counts (ascending).
pub fn bidiag_cost_table(n: usize, ms: &[usize]) -> Vec<BidiagCostRow> {
    let mut flagged = false;
    ms.iter()
        .map(|&m| {
            let golub_kahan = flops(FlopOp::GolubKahan, m, n);
            let lhc = flops(FlopOp::Lhc, m, n);
            let three_step = if m > n && m < 2 * n { flops(FlopOp::ThreeStep, m, n) } else { lhc.min(golub_kahan) };
            let at_crossover = 3 * m >= 5 * n && n > 0;
            let crossover = at_crossover && !flagged;
            flagged |= at_crossover;
            BidiagCostRow { m, n, golub_kahan, lhc, three_step, lhc_cheaper: lhc < golub_kahan, crossover }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_counts() {
        assert!((flops(FlopOp::LuFactor, 10, 10) - 2000.0 / 3.0).abs() < 1e-9);
        assert_eq!(flops(FlopOp::Lhc, 100, 10), 22000.0);
        assert_eq!(flops(FlopOp::Inverse, 10, 10), 2000.0);
        assert!((flops(FlopOp::GolubKahan, 100, 50) - 833_333.333_333).abs() < 1e-3);
        assert_eq!(flops(FlopOp::LuSolve, 3, 3), 18.0 + 18.0);
    }

    #[test]
    fn names_round_trip() {
        for op in FlopOp::ALL {
            assert_eq!(op.name().parse::<FlopOp>().unwrap(), op);
        }
        assert!("nope".parse::<FlopOp>().is_err());
    }

    #[test]
    fn lhc_wins_exactly_past_five_thirds() {
        let n = 30;
        for m in n..4 * n {
            let lhc = flops(FlopOp::Lhc, m, n);
            let gk = flops(FlopOp::GolubKahan, m, n);
            assert_eq!(lhc < gk, 3 * m > 5 * n, "m={m}");
        }
        let table = bidiag_cost_table(30, &[30, 40, 49, 50, 51, 60]);
        let flagged: Vec<usize> = table.iter().filter(|r| r.crossover).map(|r| r.m).collect();
        assert_eq!(flagged, vec![50]);
    }

    #[test]
    fn three_step_switch_point() {
        assert_eq!(three_step_switch(15, 10), 5);
        assert_eq!(three_step_switch(30, 10), 0);
        assert_eq!(three_step_switch(10, 10), 10);
        // at k = 2n − m the combined cost equals the closed three-step formula
        let (m, n) = (150usize, 100usize);
        let k = three_step_switch(m, n);
        let total = flops(FlopOp::GolubKahan, m, n) - flops(FlopOp::GolubKahan, m - k, n - k)
            + flops(FlopOp::Lhc, m - k, n - k);
        assert!((total - flops(FlopOp::ThreeStep, m, n)).abs() <= 1e-9 * total);
    }

    #[test]
    fn empty_dims() {
        for op in FlopOp::ALL {
            assert_eq!(flops(op, 0, 0), 0.0);
        }
    }
}
