//! CoNLL-U reading and writing.
//!
//! Only the first eight columns carry information we use (id, form, lemma,
//! upos, head, deprel; xpos and feats are read past). Multiword-token ranges
//! (`3-4`) and empty nodes (`3.1`) are skipped, so a parsed [`Sentence`] is
//! always a plain basic-dependency tree.

use std::fmt::Write as _;
use std::io::{self, BufRead};

use thiserror::Error;

const COLUMNS: usize = 10;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: malformed token line: {reason}")]
    Malformed { line: usize, reason: String },

    #[error("sentence {sentence}: {reason}")]
    InvalidTree { sentence: usize, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One syntactic word of a sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    /// 1-based position in the sentence.
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    /// Governor id, 0 for the root.
    pub head: usize,
    pub deprel: String,
}

impl Token {
    pub fn new(
        id: usize,
        form: impl Into<String>,
        lemma: impl Into<String>,
        upos: impl Into<String>,
        head: usize,
        deprel: impl Into<String>,
    ) -> Self {
        Token {
            id,
            form: form.into(),
            lemma: lemma.into(),
            upos: upos.into(),
            head,
            deprel: deprel.into(),
        }
    }
}

/// A dependency tree. Construction through [`Sentence::new`] guarantees
/// sequential ids, a single root and an acyclic head graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<Token>,
}

impl Sentence {
    /// Validates the tree invariants. The returned error message is used as
    /// the `reason` of [`ParseError::InvalidTree`].
    pub fn new(tokens: Vec<Token>) -> Result<Self, String> {
        if tokens.is_empty() {
            return Err("sentence has no tokens".into());
        }
        let n = tokens.len();
        for (idx, tok) in tokens.iter().enumerate() {
            if tok.id != idx + 1 {
                return Err(format!("expected token id {}, found {}", idx + 1, tok.id));
            }
            if tok.head == tok.id {
                return Err(format!("token {} is its own head", tok.id));
            }
            if tok.head > n {
                return Err(format!(
                    "token {} has head {} outside the sentence",
                    tok.id, tok.head
                ));
            }
        }

        let roots = tokens.iter().filter(|t| t.head == 0).count();
        if roots != 1 {
            return Err(format!("expected exactly one root, found {roots}"));
        }

        // Walk up from every token; a path longer than n revisits a node.
        for tok in &tokens {
            let mut cur = tok.head;
            let mut steps = 0;
            while cur != 0 {
                steps += 1;
                if steps > n {
                    return Err(format!("cycle through token {}", tok.id));
                }
                cur = tokens[cur - 1].head;
            }
        }

        Ok(Sentence { tokens })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token with the given 1-based id.
    pub fn token(&self, id: usize) -> Option<&Token> {
        id.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn root(&self) -> &Token {
        self.tokens
            .iter()
            .find(|t| t.head == 0)
            .expect("validated sentence has a root")
    }

    /// Direct dependents of `head`, in id order.
    pub fn dependents(&self, head: usize) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(move |t| t.head == head)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub source_id: String,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn new(source_id: impl Into<String>, sentences: Vec<Sentence>) -> Self {
        let source_id = source_id.into();
        assert!(
            !source_id.is_empty(),
            "document source id must be non-empty"
        );
        Document {
            source_id,
            sentences,
        }
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }
}

/// Parses a CoNLL-U stream into a [`Document`].
///
/// Line numbers in errors are 1-based; sentence indices are 0-based.
pub fn parse_conllu<R: BufRead>(reader: R, source_id: &str) -> Result<Document, ParseError> {
    let mut sentences = Vec::new();
    let mut pending: Vec<Token> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);

        if line.trim().is_empty() {
            flush(&mut pending, &mut sentences)?;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if let Some(token) = parse_token_line(line, line_no)? {
            pending.push(token);
        }
    }
    flush(&mut pending, &mut sentences)?;

    Ok(Document::new(source_id, sentences))
}

/// Convenience wrapper over [`parse_conllu`] for in-memory text.
pub fn parse_conllu_str(text: &str, source_id: &str) -> Result<Document, ParseError> {
    parse_conllu(text.as_bytes(), source_id)
}

fn flush(pending: &mut Vec<Token>, sentences: &mut Vec<Sentence>) -> Result<(), ParseError> {
    if pending.is_empty() {
        return Ok(());
    }
    let index = sentences.len();
    let sentence =
        Sentence::new(std::mem::take(pending)).map_err(|reason| ParseError::InvalidTree {
            sentence: index,
            reason,
        })?;
    sentences.push(sentence);
    Ok(())
}

fn parse_token_line(line: &str, line_no: usize) -> Result<Option<Token>, ParseError> {
    let malformed = |reason: String| ParseError::Malformed {
        line: line_no,
        reason,
    };

    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != COLUMNS {
        return Err(malformed(format!(
            "expected {COLUMNS} tab-separated columns, found {}",
            cols.len()
        )));
    }

    let id_field = cols[0];
    if id_field.contains('-') || id_field.contains('.') {
        return Ok(None);
    }
    let id: usize = id_field
        .parse()
        .map_err(|_| malformed(format!("non-integer id {id_field:?}")))?;
    if id == 0 {
        return Err(malformed("token id must be at least 1".into()));
    }
    let head: usize = cols[6]
        .parse()
        .map_err(|_| malformed(format!("non-integer head {:?}", cols[6])))?;

    Ok(Some(Token {
        id,
        form: cols[1].to_owned(),
        lemma: cols[2].to_owned(),
        upos: cols[3].to_owned(),
        head,
        deprel: cols[7].to_owned(),
    }))
}

/// Writes sentences as CoNLL-U, filling unused columns with `_`.
pub fn write_conllu(doc: &Document) -> String {
    let mut out = String::new();
    for sentence in &doc.sentences {
        for t in sentence.tokens() {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_",
                t.id, t.form, t.lemma, t.upos, t.head, t.deprel
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}
