use std::io;

use thiserror::Error;

pub type Result<T, E = WatermarkError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum WatermarkError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate key: {0}")]
    DegenerateKey(String),
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error("malformed side info: {0}")]
    MalformedSideInfo(String),
    #[error("codec error: {0}")]
    Codec(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("unsupported version: {0}")]
    UnsupportedVersion(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl WatermarkError {
    /// Stable short code printed by the CLI in front of every error line.
    pub fn code(&self) -> &'static str {
        match self {
            WatermarkError::InvalidInput(_) => "E_INVALID_INPUT",
            WatermarkError::Dimension(_) => "E_DIMENSION",
            WatermarkError::InvalidParameter(_) => "E_INVALID_PARAMETER",
            WatermarkError::DegenerateKey(_) => "E_DEGENERATE_KEY",
            WatermarkError::InvalidKey(_) => "E_INVALID_KEY",
            WatermarkError::MalformedSideInfo(_) => "E_MALFORMED_SIDEINFO",
            WatermarkError::Codec(_) => "E_CODEC",
            WatermarkError::UnsupportedFormat(_) => "E_UNSUPPORTED_FORMAT",
            WatermarkError::UnsupportedVersion(_) => "E_UNSUPPORTED_VERSION",
            WatermarkError::Io(_) => "E_IO",
        }
    }
}

pub(crate) fn dim_err(what: &str, a: (usize, usize), b: (usize, usize)) -> WatermarkError {
    WatermarkError::Dimension(format!(
        "{what}: {}x{} vs {}x{}",
        a.0, a.1, b.0, b.1
    ))
}
