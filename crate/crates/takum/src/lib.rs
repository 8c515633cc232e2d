//! Takum arithmetic: a tapered-precision logarithmic number format with a
//! fixed dynamic range of `(sqrt(e)^-255, sqrt(e)^255)`, its linear
//! variant, and posit/IEEE reference codecs for comparison.
//!
//! All bit-level operations are exact. Transcendental steps (ln, exp,
//! Gaussian logarithms) go through an interval oracle that escalates
//! precision until every rounding decision is determined.

pub mod analysis;
pub mod bitcodec;
pub mod closure;
pub mod constants;
pub mod decimal;
pub mod dyadic;
pub mod lintakum;
pub mod logarith;
pub mod oracle;
pub mod real;
pub mod refformats;

pub use bitcodec::{TakumBits, TakumValue};
pub use dyadic::Dyadic;
pub use real::{BigReal, Ell, Magnitude};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("width {0} outside 2..=64")]
    InvalidWidth(u32),
    #[error("payload {payload:#x} does not fit in {width} bits")]
    PayloadTooWide { width: u32, payload: u64 },
    #[error("value outside the open dynamic range")]
    OutOfRange,
    #[error("value is not finite")]
    NotFinite,
    #[error("operand is NaR")]
    IsNaR,
    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(u32, u32),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("unknown format: {0}")]
    UnknownFormat(String),
    #[error("unknown constant: {0}")]
    UnknownConstant(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
