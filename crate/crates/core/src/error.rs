//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("compile error: {0}")]
    Compile(String),
    #[error("inconsistent character: {0}")]
    Inconsistent(String),
}
