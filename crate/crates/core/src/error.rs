use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what}: expected length {expected}, got {got}")]
    InvalidLength {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("shortening {0} out of range, must be in 0..=61")]
    InvalidShortening(usize),

    #[error("{name} = {value} is out of range ({constraint})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("bit count {0} is odd, 4-PAM needs pairs of bits")]
    OddBitCount(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
