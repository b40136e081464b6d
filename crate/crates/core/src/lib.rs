//! Lower and upper bounds on the conditional von Neumann entropy of binary
//! classical-quantum states, computed from the error probability of the
//! associated state discrimination problem, and their application to the
//! advantage-distillation key rate.
//!
//! The crate is organised bottom-up:
//!
//! * [`matcore`]: density matrices, spectral calculus, fidelity and Rényi overlaps.
//! * [`discrimination`]: Helstrom error, error-probability bounds, the
//!   Nussbaum–Szkoła reduction and a multiple-hypothesis upper bound.
//! * [`classical_ht`]: certified brackets for the optimal error of testing
//!   n-fold product distributions, classical Chernoff and Sanov bounds.
//! * [`entropy`]: the integral representation of H(C|E) and the closed-form
//!   bounds built on it.
//! * [`adqkd`]: block states of the advantage-distillation protocol, entropy
//!   bounds per block length, key rates and verdicts.

// `!(x >= 0.0)` style checks are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adqkd;
pub mod classical_ht;
pub mod discrimination;
pub mod entropy;
pub mod matcore;
mod numerics;

pub use matcore::{C64, CMatrix, DensityMatrix, HermitianObservable, SpectralDecomposition};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: max deviation {0:e}")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite: min eigenvalue {0:e}")]
    NotPsd(f64),
    #[error("trace deviation {0:e} from 1")]
    TraceDeviation(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("{what}: requested {requested} exceeds the limit {limit}")]
    Guard {
        what: &'static str,
        requested: u128,
        limit: u128,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("degenerate scenario: {0}")]
    Degenerate(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
}

impl Error {
    /// True for refusals caused by size limits rather than invalid input.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
