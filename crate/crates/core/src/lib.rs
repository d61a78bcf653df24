//! Argument structure constructions (ASCs) in dependency-parsed text.
//!
//! The pipeline runs bottom-up:
//!
//! 1. [`ingest`] reads CoNLL-U into [`ingest::Document`]s.
//! 2. [`tagger`] assigns at most one construction type to each clausal
//!    predicate.
//! 3. [`norms`] counts (type, lemma) pairs over a reference corpus.
//! 4. [`indices`] turns the tags of one text into 54 numeric indices,
//!    using a norm table for the frequency and association measures.
//! 5. [`stats`] relates those indices to external scores.
//!
//! [`synth`] generates small synthetic parsed corpora for demos and tests.

pub mod indices;
pub mod ingest;
pub mod norms;
pub mod stats;
pub mod synth;
pub mod tagger;

pub use indices::{compute_all, IndexConfig, IndexVector};
pub use ingest::{parse_conllu, parse_conllu_str, Document, ParseError, Sentence, Token};
pub use norms::{NormError, NormTable};
pub use tagger::{AscToken, AscType, Tagger};

/// The guide's code samples, compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/conllu.md")]
    mod conllu {}
    #[doc = include_str!("../../../book/src/tagging.md")]
    mod tagging {}
    #[doc = include_str!("../../../book/src/norms.md")]
    mod norms {}
    #[doc = include_str!("../../../book/src/indices.md")]
    mod indices {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
