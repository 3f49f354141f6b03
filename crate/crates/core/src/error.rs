use thiserror::Error;

/// Errors raised by the protocol toolkit. Messages name the violated precondition.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("site index {index} out of range for lattice with {num_sites} sites")]
    InvalidSite { index: usize, num_sites: usize },

    #[error("distance {0} is below the lattice spacing (must be >= 1)")]
    SubLatticeDistance(f64),

    #[error("blocks overlap: distance {dist} is smaller than block length {block_length}")]
    OverlappingBlocks { dist: f64, block_length: f64 },

    #[error("lattice is empty")]
    EmptyLattice,

    #[error("{colors} colors requested but only {blocks} blocks available")]
    TooManyColors { colors: usize, blocks: usize },

    #[error("power-law exponent alpha={alpha} is outside the supported regime: {reason}")]
    Regime { alpha: f64, reason: &'static str },

    #[error("state has {requested} qubits, cap is {cap}")]
    SizeCap { requested: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
