//! Batch runner for the `dirac-l2` checks: seeded configurations in,
//! versioned JSON reports and CSV tables out.

pub mod commands;
pub mod config;
pub mod report;

use std::fmt;
use std::path::PathBuf;

pub use commands::run;
pub use config::{Command, DomainConfig, IdentityKind, QuadratureConfig, RunConfig, Tolerances, WeightConfig};
pub use report::{Check, Entry, Op, ReportFile, Table, SCHEMA_VERSION};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DIRAC_L2_OUT_DIR";

/// A configuration problem found before any computation (exit code 2).
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

impl From<dirac_l2::Error> for UsageError {
    fn from(e: dirac_l2::Error) -> Self {
        UsageError(e.to_string())
    }
}

/// `--out` if given, else `$DIRAC_L2_OUT_DIR`, else `dirac-l2-out`.
pub fn output_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("dirac-l2-out"))
}
