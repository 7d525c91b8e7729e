//! File formats, reports and the command-line front end for `tone-core`.

pub mod cli;
pub mod error;
pub mod geometry_file;
pub mod profile_csv;
pub mod verify;

pub use error::{CliError, CliResult};

/// Version string embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Caps rayon's global pool at `TONE_THREADS` when set.
pub fn init_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("TONE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("TONE_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))
}
