//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid side must be an even number >= 2, got {0}")]
    InvalidGridSide(usize),

    #[error("site ({x}, {y}) is out of range for an {n}x{n} grid")]
    SiteOutOfRange { x: usize, y: usize, n: usize },

    #[error("marked set is empty")]
    EmptyMarkedSet,

    #[error("fixed stopping time {t} exceeds the scan limit {t_max}")]
    StepLimitExceeded { t: usize, t_max: usize },

    #[error("momentum index ({k}, {l}) is out of range for side {n}")]
    MomentumOutOfRange { k: usize, l: usize, n: usize },

    #[error("momentum pair (0, 0) has eigenvalue 1 and no phase pair")]
    ZeroMomentumPair,

    #[error(
        "momentum pair ({k}, {l}) is degenerate (sin theta = 0); its coin vectors are undefined"
    )]
    DegenerateMomentumPair { k: usize, l: usize },

    #[error("dense operator is limited to grid sides <= {max}, requested {n}")]
    DenseOperatorTooLarge { n: usize, max: usize },

    #[error("cotangent argument {arg} is within {tol} of a pole")]
    CotangentPole { arg: f64, tol: f64 },

    #[error("amplitude correspondence requires the single marked site (0, 0)")]
    MarkedSiteNotOrigin,

    #[error("table I/O: {0}")]
    TableIo(#[from] std::io::Error),

    #[error("table cache is corrupt: {0}")]
    TableCorrupt(String),
}
