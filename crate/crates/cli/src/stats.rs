use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use asc_core::stats::{run_pipeline, FeatureMatrix, PipelineConfig, PipelineReport};

use crate::CliError;

/// Minimum number of texts present in both CSVs.
pub const MIN_JOINED_ROWS: usize = 10;

#[derive(Clone, Debug)]
pub struct StatsOptions {
    pub indices_csv: PathBuf,
    pub scores_csv: PathBuf,
    /// Report destination; standard output when `None`.
    pub report: Option<PathBuf>,
    pub score_column: String,
    pub pipeline: PipelineConfig,
}

/// File name without directories or extension, used as a fallback join key.
fn stem(name: &str) -> &str {
    let base = name.rsplit(['/', '\\']).next().unwrap_or(name);
    match base.rfind('.') {
        Some(i) if i > 0 => &base[..i],
        _ => base,
    }
}

fn parse_cell(cell: &str, what: impl FnOnce() -> String) -> Result<Option<f64>, CliError> {
    let cell = cell.trim();
    if cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan") {
        return Ok(None);
    }
    cell.parse::<f64>()
        .map(Some)
        .map_err(|_| CliError::Data(format!("{}: not a number: '{cell}'", what())))
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>, CliError> {
    csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Joins an index CSV (first column: filename) with a score CSV on the
/// filename, falling back to the file stem, and keeps rows in index-CSV
/// order.
pub fn read_features(
    indices_csv: &Path,
    scores_csv: &Path,
    score_column: &str,
) -> Result<FeatureMatrix, CliError> {
    let mut scores_rdr = reader(scores_csv)?;
    let headers = scores_rdr.headers()?.clone();
    let score_idx = headers
        .iter()
        .position(|h| h == score_column)
        .ok_or_else(|| {
            CliError::Data(format!(
                "{}: no column named '{score_column}'",
                scores_csv.display()
            ))
        })?;
    let key_idx = headers.iter().position(|h| h == "filename").unwrap_or(0);

    let mut exact: HashMap<String, f64> = HashMap::new();
    let mut by_stem: HashMap<String, Option<f64>> = HashMap::new();
    for (i, rec) in scores_rdr.records().enumerate() {
        let rec = rec?;
        let key = rec.get(key_idx).unwrap_or("").to_owned();
        let cell = rec.get(score_idx).unwrap_or("");
        let Some(score) = parse_cell(cell, || format!("{} row {}", scores_csv.display(), i + 2))?
        else {
            continue;
        };
        // ambiguous stems are not used for joining
        by_stem
            .entry(stem(&key).to_owned())
            .and_modify(|v| *v = None)
            .or_insert(Some(score));
        exact.insert(key, score);
    }

    let mut idx_rdr = reader(indices_csv)?;
    let names: Vec<String> = idx_rdr
        .headers()?
        .iter()
        .skip(1)
        .map(str::to_owned)
        .collect();
    let (mut ids, mut rows, mut target) = (Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in idx_rdr.records().enumerate() {
        let rec = rec?;
        let id = rec.get(0).unwrap_or("").to_owned();
        let score = exact
            .get(&id)
            .copied()
            .or_else(|| by_stem.get(stem(&id)).copied().flatten());
        let Some(score) = score else { continue };
        let row = rec
            .iter()
            .skip(1)
            .zip(&names)
            .map(|(cell, name)| {
                parse_cell(cell, || {
                    format!("{} row {} column {name}", indices_csv.display(), i + 2)
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        ids.push(id);
        rows.push(row);
        target.push(score);
    }

    if ids.len() < MIN_JOINED_ROWS {
        return Err(CliError::Data(format!(
            "joining indices and scores matched {} rows; at least {MIN_JOINED_ROWS} are required",
            ids.len()
        )));
    }
    FeatureMatrix::new(names, ids, rows, target).map_err(|e| CliError::Data(e.to_string()))
}

/// Runs the full selection pipeline and writes the text report.
pub fn stats(opts: &StatsOptions) -> Result<PipelineReport, CliError> {
    let features = read_features(&opts.indices_csv, &opts.scores_csv, &opts.score_column)?;
    let report =
        run_pipeline(&features, &opts.pipeline).map_err(|e| CliError::Data(e.to_string()))?;
    let text = report.render();
    match &opts.report {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(report)
}
