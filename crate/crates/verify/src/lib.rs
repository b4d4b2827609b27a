//! File formats, verification reports and the `epr` command line for the
//! EPR-state engine in [`epr_core`].
//!
//! Every check produces a [`report::CheckRecord`] carrying the statement it
//! tests, a digest of its inputs, the measured values, its tolerance and the
//! verdict. Reports are JSON and, apart from `wall_ms`, byte-identical for
//! identical inputs and seed.

pub mod checks;
pub mod cli;
pub mod error;
pub mod formats;
pub mod gen;
pub mod report;

pub use error::{CliError, Result};
pub use report::{CheckRecord, VerificationReport};
