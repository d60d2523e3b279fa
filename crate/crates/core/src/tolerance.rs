//! Thresholds for deciding when a computed quantity counts as zero.

/// Shared tolerance policy.
///
/// `rank_rel` is the single knob behind every rank and pivot decision: a
/// value is treated as zero when it falls below
/// `rank_rel * max(m, n) * scale`, where `scale` is the largest singular
/// value, the largest pivot, or the norm of the column being tested.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub rank_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-12, abs: 1e-14, rank_rel: 16.0 * f64::EPSILON }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64, rank_rel: f64) -> Self {
        assert!(rel > 0.0 && abs > 0.0 && rank_rel > 0.0, "tolerances must be positive");
        Tolerance { rel, abs, rank_rel }
    }

    pub fn with_rank_rel(self, rank_rel: f64) -> Self {
        assert!(rank_rel > 0.0, "rank_rel must be positive");
        Tolerance { rank_rel, ..self }
    }

    /// Cutoff below which a pivot, diagonal or singular value is zero.
    pub fn rank_cutoff(&self, m: usize, n: usize, scale: f64) -> f64 {
        self.rank_rel * (m.max(n).max(1) as f64) * scale.abs()
    }

    /// `|x| <= rel * scale + abs`.
    pub fn is_negligible(&self, x: f64, scale: f64) -> bool {
        x.abs() <= self.rel * scale.abs() + self.abs
    }
}
