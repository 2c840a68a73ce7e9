use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of {what} at {at}")]
    Pole { what: &'static str, at: Complex64 },

    #[error("{0} is not a negative fundamental discriminant")]
    NotFundamental(i64),

    #[error("discriminant {0} needs unit-correction mode")]
    UnitCorrection(i64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("w = {0} lies within delta of the critical line; use the subtracted form")]
    NearLine(Complex64),

    #[error("unresolved quadrature tail: {0}")]
    UnresolvedTail(String),

    #[error("phase branch gap near t = {0}")]
    BranchGap(f64),

    #[error("t = {t} outside phase branch coverage (0, {t_max}]")]
    BranchCoverage { t: f64, t_max: f64 },

    #[error("realness check failed: imaginary residue {0:e}")]
    Realness(f64),

    #[error("Heegner point at height {0} coincides with the truncation height")]
    HeightCollision(f64),

    #[error("degenerate denominator in {0}")]
    Degenerate(&'static str),

    #[error("interleaving violation: {count} roots between {lo} and {hi}")]
    Interleaving { lo: f64, hi: f64, count: usize },

    #[error("cache: {0}")]
    Cache(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
