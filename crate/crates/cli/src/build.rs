use std::fs;
use std::path::PathBuf;

use asc_core::norms::{NormBuilder, NormTable};
use asc_core::{parse_conllu_str, Tagger};
use rayon::prelude::*;

use crate::{discover, with_pool, CliError};

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub corpus_dir: PathBuf,
    pub output: PathBuf,
    pub label: String,
    pub recursive: bool,
    pub jobs: usize,
}

/// Tags every file under `corpus_dir` and writes the counts as a norm TSV.
/// Unlike `analyze`, any unreadable or malformed file aborts the build.
pub fn build_norms(opts: &BuildOptions) -> Result<NormTable, CliError> {
    let files = discover(&opts.corpus_dir, opts.recursive)?;
    let tagger = Tagger::default();
    let builder = with_pool(opts.jobs, || {
        files
            .par_iter()
            .map(|(name, path)| -> Result<NormBuilder, CliError> {
                let text =
                    fs::read_to_string(path).map_err(|e| CliError::Data(format!("{name}: {e}")))?;
                let doc = parse_conllu_str(&text, name)
                    .map_err(|e| CliError::Data(format!("{name}: {e}")))?;
                let mut b = NormBuilder::new();
                b.add_document(&tagger, &doc);
                Ok(b)
            })
            .try_reduce(NormBuilder::new, |a, b| Ok(a.merge(b)))
    })??;
    let table = builder.finish(&opts.label)?;
    table.save(&opts.output)?;
    Ok(table)
}
