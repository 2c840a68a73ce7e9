//! Batch front end: argument parsing, cache administration and report emission.

mod args;
mod cache;
mod commands;
mod error;
mod report;
mod selfcheck;

pub use args::{Cli, Command, Common, Format};
pub use cache::{cache_admin, CacheAction, CacheEntry, CacheSummary};
pub use commands::{run, RunConfig};
pub use error::{CliError, EXIT_CONFIG, EXIT_INVARIANT, EXIT_NUMERIC, EXIT_OK};
pub use report::{emit_report, Report, Table};
pub use selfcheck::{selfcheck, CheckResult};
