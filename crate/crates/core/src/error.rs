use thiserror::Error;

/// Unified error type for compression, decompression and stream parsing.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or arguments (bad dims, non-positive bound,
    /// unsupported stage combination, ...).
    #[error("config error: {0}")]
    Config(String),

    /// A stream failed structural validation. `section` names the part of
    /// the stream that was being parsed when the damage was detected.
    #[error("corrupt stream in {section}: {detail}")]
    Corruption { section: &'static str, detail: String },

    /// An input element that a stage cannot represent (NaN/Inf where the
    /// stage needs finite values, e.g. the log transform).
    #[error("non-finite input value at flat index {index}")]
    NonFinite { index: usize },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn corrupt(section: &'static str, detail: impl Into<String>) -> Self {
        Error::Corruption { section, detail: detail.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
