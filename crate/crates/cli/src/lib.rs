//! Scenario files, block-length sweeps and figure data for the `adkey` binary.

pub mod error;
pub mod figures;
pub mod scenario_file;
pub mod sweep;

pub use error::{AppError, AppResult};
