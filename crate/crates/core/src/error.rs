use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("numerical failure: {message} (jitter levels tried: {jitters:?})")]
    Numerical { message: String, jitters: Vec<f64> },

    #[error("non-finite objective value {value} at point {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("sequencing error: {0}")]
    Sequencing(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("data error: {0}")]
    Data(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by a bad configuration document rather than a
    /// failure while running.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}
