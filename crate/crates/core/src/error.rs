//! Error type shared across the simulation core.

use alloc::string::String;
use core::fmt;

/// Errors produced by graph construction, sampling, and cache filling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidArgument(String),
    /// A CSC structure violated one of its invariants; the message names the
    /// invariant that failed.
    InvalidGraph(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InvalidGraph(msg) => write!(f, "invalid graph: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
