use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("photon-number index ({n_a}, {n_b}) exceeds truncation n_max = {n_max}")]
    IndexOutOfRange { n_a: usize, n_b: usize, n_max: usize },

    #[error("duplicate amplitude for index ({n_a}, {n_b})")]
    DuplicateIndex { n_a: usize, n_b: usize },

    #[error("state norm {norm} exceeds 1")]
    NormExceeded { norm: f64 },

    #[error("amplitude list of length {len} does not fit truncation n_max = {n_max}")]
    TruncationOverflow { len: usize, n_max: usize },

    #[error("zero-norm state")]
    ZeroNorm,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid scan: {0}")]
    InvalidScan(String),

    #[error("fringe integral is zero")]
    ZeroIntegral,

    #[error("degenerate scan: {0}")]
    DegenerateScan(String),

    #[error("every phase point was excluded (flat fringe)")]
    AllPointsExcluded,

    #[error("convention calibration failed: {0}")]
    Calibration(String),
}
