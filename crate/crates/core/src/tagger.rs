//! Rule-based argument structure construction tagger.
//!
//! Every predicate with an overt subject is matched against nine syntactic
//! frames. Rules are tried most-specific first and the first match wins, so
//! each predicate receives at most one tag:
//!
//! | order | tag          | required dependents                          |
//! |-------|--------------|----------------------------------------------|
//! | 1     | `PASSIVE`    | `nsubj:pass`, `aux:pass`                     |
//! | 2     | `ATTR`       | `nsubj`, `cop`                               |
//! | 3     | `DITRAN`     | `nsubj`, `iobj`, `obj`                       |
//! | 4     | `CAUS_MOT`   | `nsubj`, `obj`, `obl`                        |
//! | 5     | `TRAN_RES`   | `nsubj`, `obj`, `xcomp`                      |
//! | 6     | `TRAN_S`     | `nsubj`, `obj`                               |
//! | 7     | `INTRAN_MOT` | `nsubj`, `obl`; no `obj`                     |
//! | 8     | `INTRAN_RES` | `nsubj`, result `advmod`; no `obj`, `obl`    |
//! | 9     | `INTRAN_S`   | `nsubj` and none of the other frame relations|
//!
//! Relations are compared on their base label (`obl:tmod` counts as `obl`)
//! except `nsubj:pass` and `aux:pass`, which only match exactly.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::ingest::{Document, Sentence, Token};

/// The nine construction tags, in canonical (alphabetical) order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AscType {
    Attr,
    CausMot,
    Ditran,
    IntranMot,
    IntranRes,
    IntranS,
    Passive,
    TranRes,
    TranS,
}

impl AscType {
    pub const ALL: [AscType; 9] = [
        AscType::Attr,
        AscType::CausMot,
        AscType::Ditran,
        AscType::IntranMot,
        AscType::IntranRes,
        AscType::IntranS,
        AscType::Passive,
        AscType::TranRes,
        AscType::TranS,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            AscType::Attr => "ATTR",
            AscType::CausMot => "CAUS_MOT",
            AscType::Ditran => "DITRAN",
            AscType::IntranMot => "INTRAN_MOT",
            AscType::IntranRes => "INTRAN_RES",
            AscType::IntranS => "INTRAN_S",
            AscType::Passive => "PASSIVE",
            AscType::TranRes => "TRAN_RES",
            AscType::TranS => "TRAN_S",
        }
    }

    /// Position in [`AscType::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    /// Dependent relations the frame requires on its predicate.
    pub fn required_relations(self) -> &'static [&'static str] {
        match self {
            AscType::Passive => &["nsubj:pass", "aux:pass"],
            AscType::Attr => &["nsubj", "cop"],
            AscType::Ditran => &["nsubj", "iobj", "obj"],
            AscType::CausMot => &["nsubj", "obj", "obl"],
            AscType::TranRes => &["nsubj", "obj", "xcomp"],
            AscType::TranS => &["nsubj", "obj"],
            AscType::IntranMot => &["nsubj", "obl"],
            AscType::IntranRes => &["nsubj", "advmod"],
            AscType::IntranS => &["nsubj"],
        }
    }
}

impl fmt::Display for AscType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownAscType(pub String);

impl fmt::Display for UnknownAscType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown ASC type {:?}", self.0)
    }
}

impl std::error::Error for UnknownAscType {}

impl FromStr for AscType {
    type Err = UnknownAscType;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AscType::ALL
            .into_iter()
            .find(|t| t.tag() == s)
            .ok_or_else(|| UnknownAscType(s.to_owned()))
    }
}

/// One tagged clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AscToken {
    pub asc_type: AscType,
    /// Sentence-local id of the predicate the frame was matched on. For
    /// `ATTR` this is the nonverbal predicate, not the copula.
    pub verb_token_id: usize,
    /// Lowercased lemma; the copula's lemma for `ATTR`.
    pub verb_lemma: String,
    pub sentence_index: usize,
    pub source_id: String,
}

impl AscToken {
    /// Tab-separated debug record:
    /// `source_id, sentence_index, verb_token_id, asc_type, verb_lemma`.
    pub fn debug_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.source_id, self.sentence_index, self.verb_token_id, self.asc_type, self.verb_lemma
        )
    }
}

/// Adverbs that never count as a resultative `advmod`.
pub const DEFAULT_ADVMOD_STOPLIST: [&str; 15] = [
    "not", "n't", "very", "too", "so", "just", "also", "then", "now", "here", "there", "always",
    "never", "often", "really",
];

#[derive(Clone, Debug)]
pub struct Tagger {
    advmod_stoplist: BTreeSet<String>,
}

impl Default for Tagger {
    fn default() -> Self {
        Tagger::with_stoplist(DEFAULT_ADVMOD_STOPLIST)
    }
}

/// Which frame relations a predicate carries.
#[derive(Default, Debug)]
struct Dependents<'a> {
    nsubj: bool,
    nsubj_pass: bool,
    aux_pass: bool,
    cop: Option<&'a Token>,
    obj: bool,
    iobj: bool,
    obl: bool,
    xcomp: bool,
    result_advmod: bool,
}

fn base_relation(deprel: &str) -> &str {
    match deprel {
        "nsubj:pass" | "aux:pass" => deprel,
        _ => deprel.split(':').next().unwrap_or(deprel),
    }
}

impl Tagger {
    pub fn with_stoplist<I, S>(stoplist: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Tagger {
            advmod_stoplist: stoplist
                .into_iter()
                .map(|s| s.as_ref().to_lowercase())
                .collect(),
        }
    }

    pub fn advmod_stoplist(&self) -> &BTreeSet<String> {
        &self.advmod_stoplist
    }

    fn is_result_advmod(&self, tok: &Token) -> bool {
        tok.upos == "ADV" && !self.advmod_stoplist.contains(&tok.lemma.to_lowercase())
    }

    fn collect<'s>(&self, sentence: &'s Sentence, head: usize) -> Dependents<'s> {
        let mut deps = Dependents::default();
        for dep in sentence.dependents(head) {
            match base_relation(&dep.deprel) {
                "nsubj" => deps.nsubj = true,
                "nsubj:pass" => deps.nsubj_pass = true,
                "aux:pass" => deps.aux_pass = true,
                "cop" => {
                    deps.cop.get_or_insert(dep);
                }
                "obj" => deps.obj = true,
                "iobj" => deps.iobj = true,
                "obl" => deps.obl = true,
                "xcomp" => deps.xcomp = true,
                "advmod" if self.is_result_advmod(dep) => deps.result_advmod = true,
                _ => {}
            }
        }
        deps
    }

    fn classify(deps: &Dependents<'_>) -> Option<AscType> {
        if deps.nsubj_pass && deps.aux_pass {
            return Some(AscType::Passive);
        }
        if !deps.nsubj {
            return None;
        }
        let t = if deps.cop.is_some() {
            AscType::Attr
        } else if deps.iobj && deps.obj {
            AscType::Ditran
        } else if deps.obj && deps.obl {
            AscType::CausMot
        } else if deps.obj && deps.xcomp {
            AscType::TranRes
        } else if deps.obj {
            AscType::TranS
        } else if deps.obl {
            AscType::IntranMot
        } else if deps.result_advmod {
            AscType::IntranRes
        } else if !deps.iobj && !deps.xcomp {
            AscType::IntranS
        } else {
            return None;
        };
        Some(t)
    }

    /// Tags every qualifying predicate of one sentence, in predicate id order.
    pub fn tag_sentence(
        &self,
        sentence: &Sentence,
        source_id: &str,
        sentence_index: usize,
    ) -> Vec<AscToken> {
        let mut out = Vec::new();
        for tok in sentence.tokens() {
            let deps = self.collect(sentence, tok.id);
            if tok.upos != "VERB" && deps.cop.is_none() {
                continue;
            }
            if !deps.nsubj && !deps.nsubj_pass {
                continue;
            }
            let Some(asc_type) = Self::classify(&deps) else {
                continue;
            };
            let lemma_source = match (asc_type, deps.cop) {
                (AscType::Attr, Some(cop)) => cop,
                _ => tok,
            };
            out.push(AscToken {
                asc_type,
                verb_token_id: tok.id,
                verb_lemma: lemma_source.lemma.to_lowercase(),
                sentence_index,
                source_id: source_id.to_owned(),
            });
        }
        out
    }

    pub fn tag_document(&self, doc: &Document) -> Vec<AscToken> {
        doc.sentences
            .iter()
            .enumerate()
            .flat_map(|(i, s)| self.tag_sentence(s, &doc.source_id, i))
            .collect()
    }

    /// Re-inspects the tree and reports whether the predicate of `token`
    /// carries every relation its frame requires.
    pub fn frame_holds(&self, sentence: &Sentence, token: &AscToken) -> bool {
        token.asc_type.required_relations().iter().all(|rel| {
            sentence.dependents(token.verb_token_id).any(|d| {
                base_relation(&d.deprel) == *rel && (*rel != "advmod" || self.is_result_advmod(d))
            })
        })
    }
}
