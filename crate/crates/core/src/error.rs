use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sample size {sample} does not match surfaces calibrated for n = {surfaces}; recalibrate for n = {sample}")]
    SizeMismatch { sample: usize, surfaces: usize },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("unknown {kind} `{name}`; valid options: {options}")]
    Unknown {
        kind: &'static str,
        name: String,
        options: String,
    },

    #[error("surface cache {}: {message}", path.display())]
    Cache { path: PathBuf, message: String },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
