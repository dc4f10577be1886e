use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("k = {k} is out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("infeasible problem: {0}")]
    Infeasible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_k(k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max {
        Err(Error::KOutOfRange { k, max })
    } else {
        Ok(())
    }
}
