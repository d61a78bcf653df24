use std::ffi::OsString;
use std::path::PathBuf;

use asc_core::stats::PipelineConfig;
use asc_core::IndexConfig;
use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::{analyze, build_norms, stats, AnalyzeOptions, BuildOptions, CliError, StatsOptions};

/// Argument structure construction indices for dependency-parsed texts.
///
/// Running without a subcommand but with the analyze flags is the same as
/// `asc analyze ...`.
#[derive(Debug, Parser)]
#[command(name = "asc", version, args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    #[command(flatten)]
    pub analyze: Option<AnalyzeArgs>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the index vector of every .conllu file in a directory.
    Analyze(AnalyzeArgs),
    /// Count construction/lemma pairs in a parsed corpus into a norm table.
    BuildNorms(BuildArgs),
    /// Relate an index CSV to scores: filtering, selection, regression.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Directory containing .conllu files.
    #[arg(long)]
    pub input_dir: PathBuf,
    /// CSV file to write.
    #[arg(long)]
    pub output_csv: PathBuf,
    /// Norm table: a bundled name (demo; cow and subt fall back to demo) or
    /// a path to a norm TSV.
    #[arg(long)]
    pub source: String,
    /// MATTR window width.
    #[arg(long, default_value_t = 11)]
    pub window: usize,
    /// Reference counts below this are left out of the frequency indices.
    #[arg(long, default_value_t = 5)]
    pub min_ref_freq: u64,
    /// Also descend into subdirectories.
    #[arg(long)]
    pub recursive: bool,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write every tagged clause as `source, sentence, token, type, lemma`
    /// (tab separated) to this file.
    #[arg(long)]
    pub debug_tags: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Directory containing .conllu files.
    pub corpus_dir: PathBuf,
    /// Norm TSV to write.
    pub output: PathBuf,
    /// Name recorded in the table header.
    #[arg(long)]
    pub label: String,
    #[arg(long)]
    pub recursive: bool,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Output of `asc analyze`.
    #[arg(long)]
    pub indices_csv: PathBuf,
    /// CSV with a filename column and a score column.
    #[arg(long)]
    pub scores_csv: PathBuf,
    /// Report file; printed to standard output if omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value = "score")]
    pub score_column: String,
    /// Minimum absolute correlation to keep an index.
    #[arg(long, default_value_t = 0.10)]
    pub threshold: f64,
    /// Minimum share of texts in which an index must be defined.
    #[arg(long, default_value_t = 0.9)]
    pub min_coverage: f64,
    #[arg(long, default_value_t = 5.0)]
    pub vif_limit: f64,
    /// Report every model within this AIC distance of the best.
    #[arg(long, default_value_t = 4.0)]
    pub delta_aic: f64,
}

impl AnalyzeArgs {
    fn options(self) -> AnalyzeOptions {
        AnalyzeOptions {
            input_dir: self.input_dir,
            output_csv: self.output_csv,
            source: self.source,
            config: IndexConfig {
                window: self.window,
                min_ref_freq: self.min_ref_freq,
                ..IndexConfig::default()
            },
            recursive: self.recursive,
            jobs: self.jobs,
            debug_tags: self.debug_tags,
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analyze(a) => {
            let opts = a.options();
            let s = analyze(&opts)?;
            eprintln!(
                "analyzed {} of {} files ({} skipped) -> {}",
                s.rows_written,
                s.files,
                s.warnings.len(),
                opts.output_csv.display()
            );
        }
        Command::BuildNorms(b) => {
            let opts = BuildOptions {
                corpus_dir: b.corpus_dir,
                output: b.output,
                label: b.label,
                recursive: b.recursive,
                jobs: b.jobs,
            };
            let table = build_norms(&opts)?;
            println!("{}", table.total());
            eprintln!(
                "{} construction tokens, {} distinct pairs -> {}",
                table.total(),
                table.pair_counts().len(),
                opts.output.display()
            );
        }
        Command::Stats(s) => {
            if !(0.0..=1.0).contains(&s.threshold) {
                return Err(CliError::Usage("--threshold must lie in [0, 1]".into()));
            }
            if !(0.0..=1.0).contains(&s.min_coverage) {
                return Err(CliError::Usage("--min-coverage must lie in [0, 1]".into()));
            }
            if s.vif_limit <= 1.0 {
                return Err(CliError::Usage("--vif-limit must exceed 1".into()));
            }
            if s.delta_aic < 0.0 {
                return Err(CliError::Usage("--delta-aic must not be negative".into()));
            }
            let opts = StatsOptions {
                indices_csv: s.indices_csv,
                scores_csv: s.scores_csv,
                report: s.report,
                score_column: s.score_column,
                pipeline: PipelineConfig {
                    threshold: s.threshold,
                    min_coverage: s.min_coverage,
                    vif_limit: s.vif_limit,
                    delta_aic: s.delta_aic,
                },
            };
            let report = stats(&opts)?;
            eprintln!(
                "best model: {} predictor(s), R^2 = {:.3}",
                report.model.predictors.len(),
                report.model.r_squared
            );
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let command = match (cli.command, cli.analyze) {
        (Some(c), _) => c,
        (None, Some(a)) => Command::Analyze(a),
        (None, None) => {
            let _ = Cli::command().print_help();
            return 1;
        }
    };
    match execute(command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
