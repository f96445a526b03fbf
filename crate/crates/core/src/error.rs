//! Error types shared across the crate.

/// Errors for configuration validation, domain checks, fitting and file formats.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fit error: {0}")]
    Fit(String),

    /// One-time-pad discipline: the key is never stretched or reused.
    #[error("key too short: {required_bits} bits required, {available_bits} available")]
    KeyTooShort {
        required_bits: usize,
        available_bits: usize,
    },

    #[error("key length mismatch: {left} vs {right} bits")]
    KeyLengthMismatch { left: usize, right: usize },

    #[error("cannot compute a bit error ratio over empty keys")]
    EmptyKey,

    /// `eve_information` needs a positive signal intensity for a defined ratio.
    #[error("undefined ratio: mu_s_eff must be positive")]
    UndefinedRatio,

    #[error("malformed PGM at byte {offset}: {message}")]
    Pgm { offset: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
