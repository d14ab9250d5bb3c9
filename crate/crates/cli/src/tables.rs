use std::path::{Path, PathBuf};

use gtp_core::basis::cache::{self, CacheOutcome};
use gtp_core::basis::{conversion_table, MAX_INPUT_DEGREE};
use gtp_core::Error;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct TableStatus {
    pub lmax: usize,
    pub path: PathBuf,
    pub outcome: CacheOutcome,
}

/// Makes sure the cache file for degree `lmax` exists and is valid, rebuilding
/// it when missing or corrupt. A valid file is left untouched.
pub fn sync_table_file(dir: &Path, lmax: usize) -> CliResult<TableStatus> {
    let path = cache::cache_file_path(dir, lmax);
    let outcome = match cache::read_table_file(&path) {
        Ok(t) if t.lmax() == lmax => CacheOutcome::Loaded,
        Ok(t) => CacheOutcome::Rebuilt(format!("file holds degree {} instead of {lmax}", t.lmax())),
        Err(Error::Io { source, .. }) if source.kind() == std::io::ErrorKind::NotFound => CacheOutcome::Built,
        Err(Error::Io { path, source }) => return Err(Error::Io { path, source }.into()),
        Err(e) => CacheOutcome::Rebuilt(e.to_string()),
    };
    if outcome != CacheOutcome::Loaded {
        let t = conversion_table(lmax)?;
        cache::write_table_file(dir, &t)?;
        // read back through the CRC check and compare
        if cache::read_table_file(&path)? != *t {
            return Err(Error::Format(format!("{} does not reproduce the table", path.display())).into());
        }
    }
    Ok(TableStatus { lmax, path, outcome })
}

/// Writes or validates the cache files for every degree `0 ..= lmax`.
pub fn cmd_tables(dir: &Path, lmax: usize) -> CliResult<Vec<TableStatus>> {
    if lmax > MAX_INPUT_DEGREE {
        return Err(CliError::Usage(format!("--lmax {lmax} exceeds the supported maximum {MAX_INPUT_DEGREE}")));
    }
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    (0..=lmax).map(|l| sync_table_file(dir, l)).collect()
}

/// Table for `lmax`, loaded from `dir` or built and written there, with a log
/// line whenever the file had to be produced.
pub fn warm_table(dir: &Path, lmax: usize) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let (_, outcome) = cache::load_or_build(dir, lmax)?;
    match outcome {
        CacheOutcome::Built => tracing::info!(lmax, dir = %dir.display(), "table cache missing, built it"),
        CacheOutcome::Rebuilt(why) => tracing::warn!(lmax, %why, "table cache invalid, rebuilt it"),
        CacheOutcome::Loaded | CacheOutcome::InMemory => {}
    }
    Ok(())
}
