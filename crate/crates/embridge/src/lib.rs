//! File formats, multi-worker drivers and reports around `embridge-core`.
//!
//! Every pipeline stage reads and writes plain text files, so any stage can
//! be swapped for an external tool.

pub mod error;
pub mod formats;
pub mod parallel;
pub mod report;

pub use embridge_core as core;
pub use error::{Error, ExitCode, Result};
pub use report::RunRecord;
