use thiserror::Error;

/// Failures raised by the factorization routines.
///
/// Display strings are stable: the CLI prints them verbatim and scripts
/// match on the leading variant name.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DimensionMismatch {0}")]
    DimensionMismatch(String),
    #[error("NonFinite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("NotSquare {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("ZeroPivot step={step}")]
    ZeroPivot { step: usize },
    #[error("Singular")]
    Singular,
    #[error("SingularTriangular index={index}")]
    SingularTriangular { index: usize },
    #[error("NotPositiveDefinite step={step}")]
    NotPositiveDefinite { step: usize },
    #[error("NotSymmetric")]
    NotSymmetric,
    #[error("NotSkewSymmetric")]
    NotSkewSymmetric,
    #[error("NegativePivot step={step}")]
    NegativePivot { step: usize },
    #[error("DowndateBreaksPD step={step}")]
    DowndateBreaksPd { step: usize },
    #[error("DependentColumn k={k}")]
    DependentColumn { k: usize },
    #[error("ZeroVector")]
    ZeroVector,
    #[error("InvalidPermutation")]
    InvalidPermutation,
    #[error("IndexOutOfRange index={index} len={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("ComplexEigenvaluesDetected")]
    ComplexEigenvalues,
    #[error("NotDiagonalizable")]
    NotDiagonalizable,
    #[error("NoConvergence iterations={iterations}")]
    NoConvergence { iterations: usize },
    #[error("RankDeficient rank={rank} expected={expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("DegenerateDirection step={step}")]
    DegenerateDirection { step: usize },
    #[error("NotBiconjugatable step={step}")]
    NotBiconjugatable { step: usize },
    #[error("SingularIntersection")]
    SingularIntersection,
    #[error("SubsetCapExceeded subsets={subsets} cap={cap}; use cpqr mode")]
    SubsetCap { subsets: u128, cap: u128 },
    #[error("NegativeInput")]
    NegativeInput,
    #[error("NonFiniteLoss iteration={iteration}")]
    NonFiniteLoss { iteration: usize },
    #[error("InvalidArgument {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Variant name without payload, e.g. `"NotPositiveDefinite"`.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonFinite { .. } => "NonFinite",
            Error::NotSquare { .. } => "NotSquare",
            Error::ZeroPivot { .. } => "ZeroPivot",
            Error::Singular => "Singular",
            Error::SingularTriangular { .. } => "SingularTriangular",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::NotSymmetric => "NotSymmetric",
            Error::NotSkewSymmetric => "NotSkewSymmetric",
            Error::NegativePivot { .. } => "NegativePivot",
            Error::DowndateBreaksPd { .. } => "DowndateBreaksPD",
            Error::DependentColumn { .. } => "DependentColumn",
            Error::ZeroVector => "ZeroVector",
            Error::InvalidPermutation => "InvalidPermutation",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::ComplexEigenvalues => "ComplexEigenvaluesDetected",
            Error::NotDiagonalizable => "NotDiagonalizable",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::DegenerateDirection { .. } => "DegenerateDirection",
            Error::NotBiconjugatable { .. } => "NotBiconjugatable",
            Error::SingularIntersection => "SingularIntersection",
            Error::SubsetCap { .. } => "SubsetCap",
            Error::NegativeInput => "NegativeInput",
            Error::NonFiniteLoss { .. } => "NonFiniteLoss",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// True for failures caused by the numbers in the input (as opposed to
    /// shapes or arguments).
    pub fn is_mathematical(&self) -> bool {
        !matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::NonFinite { .. }
                | Error::NotSquare { .. }
                | Error::IndexOutOfRange { .. }
                | Error::InvalidPermutation
                | Error::InvalidArgument(_)
                | Error::SubsetCap { .. }
                | Error::NoConvergence { .. }
        )
    }
}
