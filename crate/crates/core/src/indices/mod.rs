//! Per-text construction indices.
//!
//! Four families are computed from the tagged clauses of one text:
//!
//! * diversity: MATTR over construction types, type–lemma pairs, and pairs
//!   without *be*;
//! * proportion: share of each of the nine construction types;
//! * frequency: mean log reference frequency of types and of pairs;
//! * association: mean MI, t-score and both ΔP values, overall and per type.
//!
//! The first two families only look at the text itself; the last two need a
//! [`NormTable`]. Undefined values (too-short texts, unseen pairs) are `None`
//! and stay distinct from zero all the way into the CSV output.

mod association;
mod diversity;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use thiserror::Error;

pub use association::{
    dp_lemma, dp_structure, expected, mi, soa_indices, t_score, Association, SoaIndices,
};
pub use diversity::{diversity_indices, mattr};

use crate::ingest::Document;
use crate::norms::NormTable;
use crate::tagger::{AscToken, AscType, Tagger};

/// Number of named indices in an [`IndexVector`].
pub const INDEX_COUNT: usize = 3 + 9 + 2 + 4 + 9 * 4;

const SOA_SUFFIXES: [&str; 4] = ["MI", "T", "DeltaPLemma", "DeltaPStructure"];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("window must be at least 2 (got {0})")]
    Window(usize),
    #[error("minimum reference frequency must be at least 1 (got {0})")]
    MinRefFreq(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexConfig {
    pub window: usize,
    pub min_ref_freq: u64,
    pub be_lemmas: BTreeSet<String>,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            window: 11,
            min_ref_freq: 5,
            be_lemmas: BTreeSet::from(["be".to_owned()]),
        }
    }
}

impl IndexConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.window < 2 {
            return Err(ConfigError::Window(self.window));
        }
        if self.min_ref_freq < 1 {
            return Err(ConfigError::MinRefFreq(self.min_ref_freq));
        }
        Ok(())
    }
}

/// Canonical index names, in output column order.
pub fn index_names() -> &'static [String] {
    static NAMES: OnceLock<Vec<String>> = OnceLock::new();
    NAMES.get_or_init(|| {
        let mut names: Vec<String> = ["ascMATTR", "ascLemmaMATTR", "ascLemmaMATTRNoBe"]
            .map(String::from)
            .to_vec();
        names.extend(AscType::ALL.iter().map(|t| format!("{t}_Prop")));
        names.push("ascAvFreq".into());
        names.push("ascLemmaAvFreq".into());
        names.extend(SOA_SUFFIXES.iter().map(|m| format!("ascAv{m}")));
        for t in AscType::ALL {
            names.extend(SOA_SUFFIXES.iter().map(|m| format!("{t}_Av{m}")));
        }
        debug_assert_eq!(names.len(), INDEX_COUNT);
        names
    })
}

/// Values for every canonical index name, `None` where undefined.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexVector {
    values: Vec<Option<f64>>,
}

impl IndexVector {
    pub fn missing() -> Self {
        IndexVector {
            values: vec![None; INDEX_COUNT],
        }
    }

    pub fn get(&self, name: &str) -> Option<Option<f64>> {
        index_names()
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, Option<f64>)> + '_ {
        index_names()
            .iter()
            .map(String::as_str)
            .zip(self.values.iter().copied())
    }

    /// CSV cells in canonical order; missing values are empty strings.
    pub fn csv_cells(&self) -> Vec<String> {
        self.values
            .iter()
            .map(|v| v.map(format_sig6).unwrap_or_default())
            .collect()
    }

    /// Bitwise comparison (distinguishes `-0.0` and every NaN payload).
    pub fn bit_eq(&self, other: &IndexVector) -> bool {
        self.values
            .iter()
            .map(|v| v.map(f64::to_bits))
            .eq(other.values.iter().map(|v| v.map(f64::to_bits)))
    }
}

/// Share of each construction type, in canonical order. All `None` for an
/// empty list.
pub fn proportion_indices(ascs: &[AscToken]) -> [Option<f64>; 9] {
    if ascs.is_empty() {
        return [None; 9];
    }
    let mut counts = [0usize; 9];
    for t in ascs {
        counts[t.asc_type.index()] += 1;
    }
    let n = ascs.len() as f64;
    counts.map(|c| Some(c as f64 / n))
}

/// Mean natural-log reference frequency over the tokens whose reference
/// count is at least `min_ref_freq`. Tokens below the threshold are dropped
/// from both the sum and the count.
pub fn frequency_index<T>(
    tokens: impl IntoIterator<Item = T>,
    lookup: impl Fn(&T) -> u64,
    min_ref_freq: u64,
) -> Option<f64> {
    let mut sum = 0.0;
    let mut m = 0usize;
    for tok in tokens {
        let f = lookup(&tok);
        if f >= min_ref_freq.max(1) {
            sum += (f as f64).ln();
            m += 1;
        }
    }
    (m > 0).then(|| sum / m as f64)
}

/// Computes every index from already-tagged clauses.
pub fn compute_from_tags(ascs: &[AscToken], norm: &NormTable, cfg: &IndexConfig) -> IndexVector {
    let mut values = Vec::with_capacity(INDEX_COUNT);

    values.extend(diversity_indices(ascs, cfg.window, |v| {
        cfg.be_lemmas.contains(v)
    }));
    values.extend(proportion_indices(ascs));
    values.push(frequency_index(
        ascs.iter().map(|t| t.asc_type),
        |c| norm.type_count(*c),
        cfg.min_ref_freq,
    ));
    values.push(frequency_index(
        ascs,
        |t| norm.pair_count(t.asc_type, &t.verb_lemma),
        cfg.min_ref_freq,
    ));
    let soa = soa_indices(ascs, norm);
    values.extend(soa.overall);
    for row in soa.per_type {
        values.extend(row);
    }

    debug_assert_eq!(values.len(), INDEX_COUNT);
    IndexVector { values }
}

/// Tags `doc` and computes its full index vector.
pub fn compute_all(
    doc: &Document,
    norm: &NormTable,
    cfg: &IndexConfig,
    tagger: &Tagger,
) -> IndexVector {
    compute_from_tags(&tagger.tag_document(doc), norm, cfg)
}

/// Formats with six significant digits in the style of C's `%g`: trailing
/// zeros are trimmed and exponents below -4 or at least 6 switch to
/// scientific notation.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");

    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_owned()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
