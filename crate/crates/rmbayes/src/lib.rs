//! File formats, reports and parallel execution on top of `rmbayes-core`.

pub mod cli;
pub mod grid;
pub mod input;
pub mod manifest;
pub mod render;
pub mod report;
pub mod tables;

pub use rmbayes_core as core;

/// Environment variable overriding the default output directory of
/// `simulate`.
pub const OUT_DIR_ENV: &str = "RMBAYES_OUT_DIR";
