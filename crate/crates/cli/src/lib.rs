//! Batch front end for `asc_core`: analyze a directory of CoNLL-U files,
//! build norm tables, and run the score pipeline over index CSVs.

mod analyze;
mod args;
mod build;
mod stats;

use std::io;
use std::path::{Path, PathBuf};

use asc_core::norms::{bundled, NormError, NormTable, DEMO_SOURCE};
use thiserror::Error;
use walkdir::WalkDir;

pub use analyze::{analyze, AnalyzeOptions, AnalyzeSummary};
pub use args::{run, Cli, Command};
pub use build::{build_norms, BuildOptions};
pub use stats::{read_features, stats, StatsOptions};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation; exit code 1.
    #[error("{0}")]
    Usage(String),

    /// Bad input data or failed I/O; exit code 2.
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<NormError> for CliError {
    fn from(e: NormError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

/// Bundled names that stand in for reference corpora we cannot ship.
const DEMO_ALIASES: [&str; 2] = ["cow", "subt"];

/// Resolves `--source`: a bundled table name, an alias of one, or a path
/// to a norm TSV.
pub fn resolve_source(source: &str) -> Result<NormTable, CliError> {
    if let Some(table) = bundled(source) {
        return Ok(table);
    }
    if DEMO_ALIASES.contains(&source) {
        eprintln!(
            "warning: no '{source}' norm table is bundled; using the synthetic '{DEMO_SOURCE}' table"
        );
        return Ok(bundled(DEMO_SOURCE).expect("demo table is bundled"));
    }
    let path = Path::new(source);
    if !path.is_file() {
        return Err(CliError::Data(format!(
            "unknown norm source '{source}': not a bundled table ({DEMO_SOURCE}, {}) or a readable file",
            DEMO_ALIASES.join(", ")
        )));
    }
    NormTable::load(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// `*.conllu` files under `dir`, sorted by their path relative to `dir`.
/// Returns (relative name with `/` separators, full path).
pub fn discover(dir: &Path, recursive: bool) -> Result<Vec<(String, PathBuf)>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Data(format!(
            "input directory {} does not exist",
            dir.display()
        )));
    }
    let walker = WalkDir::new(dir)
        .min_depth(1)
        .max_depth(if recursive { usize::MAX } else { 1 })
        .follow_links(true);
    let mut files = Vec::new();
    for entry in walker {
        let entry = entry.map_err(|e| CliError::Data(e.to_string()))?;
        let path = entry.path();
        if !entry.file_type().is_file() || path.extension().is_none_or(|e| e != "conllu") {
            continue;
        }
        let rel = path.strip_prefix(dir).expect("walked under dir");
        let name = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        files.push((name, path.to_path_buf()));
    }
    files.sort();
    Ok(files)
}

/// Runs `f` on a pool with `jobs` workers (0 = one per core).
pub(crate) fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} worker threads: {e}")))?;
    Ok(pool.install(f))
}
