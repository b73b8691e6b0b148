use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("norm {norm} exceeds configured bound {bound}")]
    OverBound { norm: u128, bound: u128 },
    #[error("class number {0} != 1 (pass allow_nonprincipal to override)")]
    ClassNumber(u64),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("no convergent route: {0}")]
    NoConvergence(String),
    #[error("certificate failure: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
