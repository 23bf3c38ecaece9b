//! File formats and the command-line driver built on `pgc-core`.

pub mod cli;
pub mod formats;
