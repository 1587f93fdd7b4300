use alloc::string::String;
use core::fmt;

/// Failures reported by the cocycle algorithms.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Matrix or vector shapes do not agree.
    DimensionMismatch { expected: usize, found: usize },
    /// A matrix entry is NaN or infinite.
    NonFinite { time: i64 },
    /// The requested time range is not covered by the window.
    OutOfWindow {
        requested: (i64, i64),
        available: (i64, i64),
    },
    /// A propagated vector collapsed to (numerically) zero.
    VectorAnnihilated { time: i64 },
    /// Removing the frame components left nothing behind.
    ProjectionAnnihilated { checkpoint: Option<i64> },
    /// QR averaging hit an exactly singular step.
    RankDeficientStep { time: i64 },
    /// QR push-forward lost a basis direction.
    BasisCollapse { time: i64 },
    /// A triangular factor of the R-cocycle is singular.
    SingularFactor { index: usize },
    /// The leading exponents are not strictly separated.
    UnseparatedSpectrum,
    /// The banded least-squares system is numerically rank deficient.
    SystemRankDeficient,
    /// The two spanning vectors of the intersection step are parallel.
    DegenerateSpan,
    /// The intersection matrix has no well-separated null direction.
    AmbiguousNullSpace { ratio: f64 },
    /// The SVD iteration did not converge.
    SvdFailed,
    /// The exact-model generator could not draw a well-conditioned basis.
    IllConditioned { time: i64 },
    /// A parameter violates its documented precondition.
    InvalidParameter(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Self::NonFinite { time } => write!(f, "non-finite matrix entry at time {time}"),
            Self::OutOfWindow {
                requested,
                available,
            } => write!(
                f,
                "time range [{}, {}] not covered by window [{}, {}]",
                requested.0, requested.1, available.0, available.1
            ),
            Self::VectorAnnihilated { time } => write!(f, "vector annihilated at time {time}"),
            Self::ProjectionAnnihilated { checkpoint: Some(t) } => {
                write!(f, "projection annihilated at checkpoint time {t}")
            }
            Self::ProjectionAnnihilated { checkpoint: None } => {
                write!(f, "projection annihilated")
            }
            Self::RankDeficientStep { time } => write!(f, "rank-deficient step at time {time}"),
            Self::BasisCollapse { time } => write!(f, "basis collapse at time {time}"),
            Self::SingularFactor { index } => write!(f, "singular R factor at index {index}"),
            Self::UnseparatedSpectrum => write!(f, "unseparated spectrum"),
            Self::SystemRankDeficient => write!(f, "system rank-deficient"),
            Self::DegenerateSpan => write!(f, "degenerate span: impulse responses are parallel"),
            Self::AmbiguousNullSpace { ratio } => {
                write!(f, "ambiguous null space (singular value ratio {ratio:.3e})")
            }
            Self::SvdFailed => write!(f, "singular value decomposition did not converge"),
            Self::IllConditioned { time } => {
                write!(f, "could not draw a well-conditioned basis at time {time}")
            }
            Self::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
