use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use asc_core::indices::{compute_from_tags, index_names};
use asc_core::{parse_conllu_str, AscToken, IndexConfig, IndexVector, Tagger};
use rayon::prelude::*;

use crate::{discover, resolve_source, with_pool, CliError};

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub input_dir: PathBuf,
    pub output_csv: PathBuf,
    /// Bundled table name or norm TSV path.
    pub source: String,
    pub config: IndexConfig,
    pub recursive: bool,
    /// Worker threads; 0 uses one per core.
    pub jobs: usize,
    /// Where to write the tagger debug stream, if anywhere.
    pub debug_tags: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnalyzeSummary {
    pub files: usize,
    pub rows_written: usize,
    /// One line per skipped file.
    pub warnings: Vec<String>,
}

struct Analyzed {
    name: String,
    result: Result<(IndexVector, Vec<AscToken>), String>,
}

/// Computes the index vector of every `*.conllu` file and writes one CSV
/// row per readable file, in filename order.
pub fn analyze(opts: &AnalyzeOptions) -> Result<AnalyzeSummary, CliError> {
    opts.config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let norm = resolve_source(&opts.source)?;
    let files = discover(&opts.input_dir, opts.recursive)?;
    if files.is_empty() {
        return Err(CliError::Data(format!(
            "no .conllu files in {}",
            opts.input_dir.display()
        )));
    }

    let tagger = Tagger::default();
    let results: Vec<Analyzed> = with_pool(opts.jobs, || {
        files
            .par_iter()
            .map(|(name, path)| {
                let result = fs::read_to_string(path)
                    .map_err(|e| e.to_string())
                    .and_then(|text| parse_conllu_str(&text, name).map_err(|e| e.to_string()))
                    .map(|doc| {
                        let tags = tagger.tag_document(&doc);
                        (compute_from_tags(&tags, &norm, &opts.config), tags)
                    });
                Analyzed {
                    name: name.clone(),
                    result,
                }
            })
            .collect()
    })?;

    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&opts.output_csv)?;
    out.write_record(std::iter::once("filename").chain(index_names().iter().map(String::as_str)))?;

    let mut debug = match &opts.debug_tags {
        Some(p) => Some(BufWriter::new(File::create(p)?)),
        None => None,
    };

    let mut summary = AnalyzeSummary {
        files: files.len(),
        ..AnalyzeSummary::default()
    };
    for a in results {
        match a.result {
            Ok((vector, tags)) => {
                let mut row = vec![a.name];
                row.extend(vector.csv_cells());
                out.write_record(&row)?;
                summary.rows_written += 1;
                if let Some(w) = debug.as_mut() {
                    for t in &tags {
                        writeln!(w, "{}", t.debug_line())?;
                    }
                }
            }
            Err(e) => {
                let line = format!("warning: skipped {}: {e}", a.name);
                eprintln!("{line}");
                summary.warnings.push(line);
            }
        }
    }
    out.flush()?;
    if let Some(mut w) = debug {
        w.flush()?;
    }
    Ok(summary)
}
