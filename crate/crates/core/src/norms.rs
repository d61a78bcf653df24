//! Reference-corpus norm tables.
//!
//! A [`NormTable`] stores how often each (construction, verb lemma) pair was
//! tagged in a reference corpus, together with the two marginals and the
//! grand total. Marginals are always derived from the pair counts, never
//! stored independently, so a table is consistent by construction.
//!
//! On disk a table is a small tab-separated file:
//!
//! ```text
//! #source=demo
//! #version=1.0.0
//! #total=12
//! ATTR    be    5
//! TRAN_S  eat   7
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::ingest::Document;
use crate::tagger::{AscToken, AscType, Tagger};

/// Version written into new norm files. Files with a different major
/// version are rejected on load.
pub const FORMAT_VERSION: &str = "1.0.0";

#[derive(Debug, Error)]
pub enum NormError {
    #[error("empty norm table: no ASC tokens were counted")]
    Empty,

    #[error("malformed norm file (line {line}): {reason}")]
    Malformed { line: usize, reason: String },

    #[error("inconsistent norm table: {0}")]
    Inconsistent(String),

    #[error("unsupported norm file version {found} (expected {FORMAT_VERSION})")]
    Version { found: String },

    #[error("invalid norm table label or lemma: {0}")]
    InvalidText(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormMeta {
    pub source: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormTable {
    pair_counts: BTreeMap<(AscType, String), u64>,
    type_counts: BTreeMap<AscType, u64>,
    lemma_counts: BTreeMap<String, u64>,
    total: u64,
    meta: NormMeta,
}

/// The 2×2 table of one (construction, lemma) pair.
///
/// `a` = pair, `b` = lemma in other constructions, `c_cell` = construction
/// with other lemmas, `d` = everything else.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContingencyCells {
    pub a: u64,
    pub b: u64,
    pub c_cell: u64,
    pub d: u64,
}

impl ContingencyCells {
    pub fn new(a: u64, b: u64, c_cell: u64, d: u64) -> Self {
        ContingencyCells { a, b, c_cell, d }
    }

    pub fn total(&self) -> u64 {
        self.a + self.b + self.c_cell + self.d
    }
}

fn check_text(s: &str) -> Result<(), NormError> {
    if s.is_empty() || s.contains(['\t', '\n', '\r']) {
        return Err(NormError::InvalidText(format!("{s:?}")));
    }
    Ok(())
}

impl NormTable {
    /// Builds a table from pair counts; marginals and total are derived.
    pub fn from_pairs<I>(pairs: I, source: &str) -> Result<Self, NormError>
    where
        I: IntoIterator<Item = ((AscType, String), u64)>,
    {
        check_text(source)?;
        let mut pair_counts: BTreeMap<(AscType, String), u64> = BTreeMap::new();
        for ((c, v), n) in pairs {
            check_text(&v)?;
            if n == 0 {
                return Err(NormError::Inconsistent(format!("zero count for {c}/{v}")));
            }
            *pair_counts.entry((c, v)).or_default() += n;
        }
        if pair_counts.is_empty() {
            return Err(NormError::Empty);
        }

        let mut type_counts = BTreeMap::new();
        let mut lemma_counts = BTreeMap::new();
        let mut total = 0u64;
        for ((c, v), &n) in &pair_counts {
            *type_counts.entry(*c).or_default() += n;
            *lemma_counts.entry(v.clone()).or_default() += n;
            total += n;
        }

        Ok(NormTable {
            pair_counts,
            type_counts,
            lemma_counts,
            total,
            meta: NormMeta {
                source: source.to_owned(),
                version: FORMAT_VERSION.to_owned(),
            },
        })
    }

    pub fn pair_count(&self, c: AscType, lemma: &str) -> u64 {
        self.pair_counts
            .get(&(c, lemma.to_owned()))
            .copied()
            .unwrap_or(0)
    }

    pub fn type_count(&self, c: AscType) -> u64 {
        self.type_counts.get(&c).copied().unwrap_or(0)
    }

    pub fn lemma_count(&self, lemma: &str) -> u64 {
        self.lemma_counts.get(lemma).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn meta(&self) -> &NormMeta {
        &self.meta
    }

    pub fn pair_counts(&self) -> &BTreeMap<(AscType, String), u64> {
        &self.pair_counts
    }

    pub fn type_counts(&self) -> &BTreeMap<AscType, u64> {
        &self.type_counts
    }

    pub fn lemma_counts(&self) -> &BTreeMap<String, u64> {
        &self.lemma_counts
    }

    /// Contingency cells for construction `c` and lemma `v`. Absent pairs
    /// give `a = 0`.
    pub fn contingency(&self, c: AscType, v: &str) -> ContingencyCells {
        let a = self.pair_count(c, v);
        let b = self.lemma_count(v) - a;
        let c_cell = self.type_count(c) - a;
        let d = self.total - a - b - c_cell;
        ContingencyCells { a, b, c_cell, d }
    }

    /// Serializes to the TSV norm format. Rows are sorted by construction
    /// then lemma, so equal tables always produce identical bytes.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "#source={}", self.meta.source).unwrap();
        writeln!(out, "#version={}", self.meta.version).unwrap();
        writeln!(out, "#total={}", self.total).unwrap();
        for ((c, v), n) in &self.pair_counts {
            writeln!(out, "{c}\t{v}\t{n}").unwrap();
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, NormError> {
        let mut headers: BTreeMap<&str, &str> = BTreeMap::new();
        let mut pairs = Vec::new();
        let mut seen = std::collections::BTreeSet::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let malformed = |reason: String| NormError::Malformed {
                line: line_no,
                reason,
            };
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                if !pairs.is_empty() {
                    return Err(malformed("header line after data rows".into()));
                }
                let (key, value) = h
                    .split_once('=')
                    .ok_or_else(|| malformed(format!("bad header {line:?}")))?;
                if headers.insert(key, value).is_some() {
                    return Err(malformed(format!("duplicate header {key:?}")));
                }
                continue;
            }

            let cols: Vec<&str> = line.split('\t').collect();
            let [tag, lemma, count] = cols[..] else {
                return Err(malformed(format!(
                    "expected 3 columns, found {}",
                    cols.len()
                )));
            };
            let c: AscType = tag.parse().map_err(|e| malformed(format!("{e}")))?;
            let n: u64 = count
                .parse()
                .map_err(|_| malformed(format!("bad count {count:?}")))?;
            if !seen.insert((c, lemma.to_owned())) {
                return Err(NormError::Inconsistent(format!(
                    "duplicate row {tag}/{lemma}"
                )));
            }
            pairs.push(((c, lemma.to_owned()), n));
        }

        let header = |key: &str| {
            headers
                .get(key)
                .copied()
                .ok_or_else(|| NormError::Malformed {
                    line: 0,
                    reason: format!("missing #{key} header"),
                })
        };
        let source = header("source")?;
        let version = header("version")?;
        let total: u64 = header("total")?.parse().map_err(|_| NormError::Malformed {
            line: 0,
            reason: "bad #total header".into(),
        })?;

        let major = |v: &str| v.split('.').next().map(str::to_owned);
        if major(version) != major(FORMAT_VERSION) {
            return Err(NormError::Version {
                found: version.to_owned(),
            });
        }
        if pairs.is_empty() {
            return Err(NormError::Malformed {
                line: 0,
                reason: "no data rows".into(),
            });
        }

        let mut table = NormTable::from_pairs(pairs, source)?;
        if table.total != total {
            return Err(NormError::Inconsistent(format!(
                "#total={total} but rows sum to {}",
                table.total
            )));
        }
        table.meta.version = version.to_owned();
        Ok(table)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), NormError> {
        fs::write(path, self.to_tsv())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NormError> {
        let text = fs::read_to_string(path)?;
        NormTable::from_tsv(&text)
    }
}

/// Name of the norm table shipped with the library.
pub const DEMO_SOURCE: &str = "demo";

const DEMO_TSV: &str = include_str!("../data/demo_norms.tsv");

/// Norm tables compiled into the library, looked up by source name.
///
/// The `demo` table is counted from the synthetic corpus in
/// [`crate::synth::demo_corpus`]; it is meant for trying the tools out, not
/// for research use.
pub fn bundled(name: &str) -> Option<NormTable> {
    match name {
        DEMO_SOURCE => Some(NormTable::from_tsv(DEMO_TSV).expect("bundled demo table parses")),
        _ => None,
    }
}

/// Accumulates pair counts; partial builders can be merged in any order.
#[derive(Clone, Debug, Default)]
pub struct NormBuilder {
    pairs: BTreeMap<(AscType, String), u64>,
}

impl NormBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_tokens<'a>(&mut self, tokens: impl IntoIterator<Item = &'a AscToken>) {
        for t in tokens {
            *self
                .pairs
                .entry((t.asc_type, t.verb_lemma.clone()))
                .or_default() += 1;
        }
    }

    pub fn add_document(&mut self, tagger: &Tagger, doc: &Document) {
        self.add_tokens(&tagger.tag_document(doc));
    }

    pub fn merge(mut self, other: NormBuilder) -> NormBuilder {
        for (k, n) in other.pairs {
            *self.pairs.entry(k).or_default() += n;
        }
        self
    }

    pub fn finish(self, label: &str) -> Result<NormTable, NormError> {
        NormTable::from_pairs(self.pairs, label)
    }
}

/// Tags every document and counts the resulting ASC tokens.
pub fn build_norms<I>(documents: I, label: &str, tagger: &Tagger) -> Result<NormTable, NormError>
where
    I: IntoIterator<Item = Document>,
{
    let mut builder = NormBuilder::new();
    for doc in documents {
        builder.add_document(tagger, &doc);
    }
    builder.finish(label)
}

/// Parallel variant of [`build_norms`] over an in-memory corpus.
pub fn build_norms_par(
    documents: &[Document],
    label: &str,
    tagger: &Tagger,
) -> Result<NormTable, NormError> {
    documents
        .par_iter()
        .fold(NormBuilder::new, |mut b, doc| {
            b.add_document(tagger, doc);
            b
        })
        .reduce(NormBuilder::new, NormBuilder::merge)
        .finish(label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use AscType::*;

    fn four_pairs() -> NormTable {
        NormTable::from_pairs(
            [
                ((TranS, "eat".to_owned()), 8),
                ((IntranS, "eat".to_owned()), 2),
                ((TranS, "see".to_owned()), 2),
                ((IntranS, "run".to_owned()), 88),
            ],
            "test",
        )
        .unwrap()
    }

    #[test]
    fn contingency_hand_arithmetic() {
        let t = four_pairs();
        assert_eq!(t.total(), 100);
        assert_eq!(
            t.contingency(TranS, "eat"),
            ContingencyCells::new(8, 2, 2, 88)
        );
    }

    #[test]
    fn degenerate_single_pair() {
        let t = NormTable::from_pairs([((Ditran, "give".to_owned()), 1)], "x").unwrap();
        assert_eq!(
            t.contingency(Ditran, "give"),
            ContingencyCells::new(1, 0, 0, 0)
        );
    }

    #[test]
    fn absent_lemma_gives_zero_row() {
        let t = four_pairs();
        assert_eq!(
            t.contingency(TranS, "fly"),
            ContingencyCells::new(0, 0, 10, 90)
        );
        assert_eq!(
            t.contingency(Passive, "fly"),
            ContingencyCells::new(0, 0, 0, 100)
        );
    }

    #[test]
    fn marginals() {
        let t = four_pairs();
        assert_eq!(t.type_count(TranS), 10);
        assert_eq!(t.type_count(IntranS), 90);
        assert_eq!(t.lemma_count("eat"), 10);
        assert_eq!(t.pair_count(IntranS, "run"), 88);
        assert_eq!(t.pair_count(IntranS, "walk"), 0);
    }

    #[test]
    fn tsv_layout() {
        let t = four_pairs();
        assert_eq!(
            t.to_tsv(),
            "#source=test\n#version=1.0.0\n#total=100\n\
             INTRAN_S\teat\t2\nINTRAN_S\trun\t88\nTRAN_S\teat\t8\nTRAN_S\tsee\t2\n"
        );
    }

    #[test]
    fn round_trip() {
        let t = four_pairs();
        let back = NormTable::from_tsv(&t.to_tsv()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_tsv(), t.to_tsv());
    }

    #[test]
    fn truncated_file() {
        let tsv = four_pairs().to_tsv();
        let cut = &tsv[..tsv.len() - 4];
        let err = NormTable::from_tsv(cut).unwrap_err();
        assert!(err.to_string().contains("malformed norm file"), "{err}");

        let err = NormTable::from_tsv("#source=x\n#vers").unwrap_err();
        assert!(err.to_string().contains("malformed norm file"), "{err}");
    }

    #[test]
    fn marginal_disagreement() {
        let tsv = four_pairs().to_tsv().replace("#total=100", "#total=101");
        let err = NormTable::from_tsv(&tsv).unwrap_err();
        assert!(err.to_string().contains("inconsistent norm table"), "{err}");
    }

    #[test]
    fn version_mismatch() {
        let tsv = four_pairs()
            .to_tsv()
            .replace("#version=1.0.0", "#version=2.0.0");
        assert!(matches!(
            NormTable::from_tsv(&tsv),
            Err(NormError::Version { .. })
        ));
    }

    #[test]
    fn zero_count_and_duplicates_rejected() {
        let tsv = "#source=x\n#version=1.0.0\n#total=0\nTRAN_S\teat\t0\n";
        assert!(matches!(
            NormTable::from_tsv(tsv),
            Err(NormError::Inconsistent(_))
        ));
        let tsv = "#source=x\n#version=1.0.0\n#total=2\nTRAN_S\teat\t1\nTRAN_S\teat\t1\n";
        assert!(matches!(
            NormTable::from_tsv(tsv),
            Err(NormError::Inconsistent(_))
        ));
    }

    #[test]
    fn empty_build_is_an_error() {
        let err = build_norms(Vec::new(), "x", &Tagger::default()).unwrap_err();
        assert!(err.to_string().contains("empty norm table"));
    }

    #[test]
    fn single_ditransitive_document() {
        let text = "1\tShe\tshe\tPRON\t_\t_\t2\tnsubj\t_\t_\n\
            2\tgave\tgive\tVERB\t_\t_\t0\troot\t_\t_\n\
            3\thim\the\tPRON\t_\t_\t2\tiobj\t_\t_\n\
            4\tbooks\tbook\tNOUN\t_\t_\t2\tobj\t_\t_\n";
        let doc = crate::ingest::parse_conllu_str(text, "d").unwrap();
        let t = build_norms([doc], "x", &Tagger::default()).unwrap();
        assert_eq!(t.total(), 1);
        assert_eq!(t.pair_counts().len(), 1);
        assert_eq!(t.pair_count(Ditran, "give"), 1);
    }

    #[test]
    fn label_with_newline_rejected() {
        assert!(NormTable::from_pairs([((TranS, "eat".to_owned()), 1)], "a\nb").is_err());
    }
}
