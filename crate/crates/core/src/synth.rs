//! Synthetic dependency-parsed English.
//!
//! Produces small, well-formed UD trees that instantiate one construction
//! each, drawn from fixed lexicons with Zipf-like verb weights. The
//! generator backs the bundled demo norm table and the test fixtures; it
//! makes no attempt at natural text.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{Document, Sentence, Token};
use crate::tagger::AscType;

/// Verbs per construction as (lemma, past form), most frequent first.
fn verbs(t: AscType) -> &'static [(&'static str, &'static str)] {
    match t {
        AscType::Attr => &[("be", "was")],
        AscType::CausMot => &[
            ("put", "put"),
            ("take", "took"),
            ("bring", "brought"),
            ("send", "sent"),
            ("throw", "threw"),
            ("push", "pushed"),
            ("move", "moved"),
            ("pull", "pulled"),
            ("drag", "dragged"),
            ("place", "placed"),
        ],
        AscType::Ditran => &[
            ("give", "gave"),
            ("tell", "told"),
            ("send", "sent"),
            ("show", "showed"),
            ("offer", "offered"),
            ("buy", "bought"),
            ("teach", "taught"),
            ("lend", "lent"),
            ("hand", "handed"),
        ],
        AscType::IntranMot => &[
            ("go", "went"),
            ("come", "came"),
            ("walk", "walked"),
            ("run", "ran"),
            ("move", "moved"),
            ("return", "returned"),
            ("travel", "travelled"),
            ("fall", "fell"),
            ("arrive", "arrived"),
            ("fly", "flew"),
        ],
        AscType::IntranRes => &[
            ("break", "broke"),
            ("fall", "fell"),
            ("run", "ran"),
            ("slide", "slid"),
            ("blow", "blew"),
            ("wear", "wore"),
            ("drift", "drifted"),
        ],
        AscType::IntranS => &[
            ("work", "worked"),
            ("sleep", "slept"),
            ("laugh", "laughed"),
            ("run", "ran"),
            ("wait", "waited"),
            ("smile", "smiled"),
            ("cry", "cried"),
            ("die", "died"),
            ("happen", "happened"),
            ("sing", "sang"),
            ("leave", "left"),
        ],
        AscType::Passive => &[
            ("make", "made"),
            ("give", "given"),
            ("find", "found"),
            ("build", "built"),
            ("take", "taken"),
            ("write", "written"),
            ("break", "broken"),
            ("use", "used"),
            ("see", "seen"),
            ("call", "called"),
        ],
        AscType::TranRes => &[
            ("make", "made"),
            ("paint", "painted"),
            ("keep", "kept"),
            ("leave", "left"),
            ("drive", "drove"),
            ("get", "got"),
            ("push", "pushed"),
            ("wipe", "wiped"),
        ],
        AscType::TranS => &[
            ("have", "had"),
            ("make", "made"),
            ("take", "took"),
            ("get", "got"),
            ("see", "saw"),
            ("want", "wanted"),
            ("use", "used"),
            ("find", "found"),
            ("give", "gave"),
            ("eat", "ate"),
            ("like", "liked"),
            ("need", "needed"),
            ("read", "read"),
            ("write", "wrote"),
            ("buy", "bought"),
            ("love", "loved"),
            ("build", "built"),
            ("break", "broke"),
            ("open", "opened"),
            ("play", "played"),
        ],
    }
}

const PRONOUNS: [(&str, &str); 5] = [
    ("She", "she"),
    ("He", "he"),
    ("They", "they"),
    ("We", "we"),
    ("I", "I"),
];
const OBJ_PRONOUNS: [(&str, &str); 4] =
    [("him", "he"), ("her", "she"), ("them", "they"), ("me", "I")];
const NOUNS: [&str; 16] = [
    "book", "door", "dog", "house", "car", "letter", "window", "teacher", "box", "city", "river",
    "table", "friend", "child", "road", "garden",
];
const ADJECTIVES: [&str; 10] = [
    "happy", "red", "big", "open", "clean", "old", "quiet", "ready", "tired", "empty",
];
const RESULT_ADVERBS: [&str; 6] = ["away", "apart", "open", "loose", "free", "down"];
const PREPOSITIONS: [&str; 5] = ["into", "to", "onto", "across", "from"];

/// Incrementally assembles one sentence.
struct Builder {
    tokens: Vec<Token>,
}

impl Builder {
    fn new() -> Self {
        Builder { tokens: Vec::new() }
    }

    /// Adds a token; head and relation are patched later with `attach`.
    fn push(&mut self, form: &str, lemma: &str, upos: &str) -> usize {
        let id = self.tokens.len() + 1;
        self.tokens
            .push(Token::new(id, form, lemma, upos, 0, "root"));
        id
    }

    fn attach(&mut self, id: usize, head: usize, rel: &str) {
        let t = &mut self.tokens[id - 1];
        t.head = head;
        t.deprel = rel.to_owned();
    }

    fn dep(&mut self, form: &str, lemma: &str, upos: &str, head: usize, rel: &str) -> usize {
        let id = self.push(form, lemma, upos);
        self.attach(id, head, rel);
        id
    }

    fn finish(self) -> Sentence {
        Sentence::new(self.tokens).expect("generated tree is well formed")
    }
}

#[derive(Clone, Debug)]
pub struct Synth {
    rng: ChaCha8Rng,
}

impl Synth {
    pub fn new(seed: u64) -> Self {
        Synth {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.rng.random_range(0..items.len())]
    }

    /// Zipf-weighted verb for construction `t`.
    pub fn verb(&mut self, t: AscType) -> (&'static str, &'static str) {
        let list = verbs(t);
        let weights = (1..=list.len()).map(|r| 1.0 / r as f64);
        let dist = WeightedIndex::new(weights).expect("non-empty lexicon");
        list[dist.sample(&mut self.rng)]
    }

    /// Subject noun phrase attached to `head` via `rel`, built before the
    /// head exists: returns the ids to patch.
    fn subject(&mut self, b: &mut Builder) -> Vec<usize> {
        if self.rng.random_bool(0.5) {
            let (form, lemma) = *self.pick(&PRONOUNS);
            vec![b.push(form, lemma, "PRON")]
        } else {
            let det = b.push("The", "the", "DET");
            let noun = *self.pick(&NOUNS);
            let n = b.push(noun, noun, "NOUN");
            b.attach(det, n, "det");
            vec![n]
        }
    }

    fn noun_phrase(&mut self, b: &mut Builder, head: usize, rel: &str) -> usize {
        let det = b.push("the", "the", "DET");
        let noun = *self.pick(&NOUNS);
        let n = b.dep(noun, noun, "NOUN", head, rel);
        b.attach(det, n, "det");
        n
    }

    fn pp(&mut self, b: &mut Builder, head: usize) {
        let prep = *self.pick(&PREPOSITIONS);
        let case = b.push(prep, prep, "ADP");
        let n = self.noun_phrase(b, head, "obl");
        b.attach(case, n, "case");
    }

    /// One sentence realizing construction `t` with the given verb.
    pub fn clause_with(&mut self, t: AscType, verb: (&str, &str)) -> Sentence {
        let (lemma, past) = verb;
        let mut b = Builder::new();
        let subj = self.subject(&mut b);
        let subj_head = subj[0];

        let pred = match t {
            AscType::Attr => {
                let cop = b.push("was", "be", "AUX");
                let pred = if self.rng.random_bool(0.7) {
                    let adj = *self.pick(&ADJECTIVES);
                    b.push(adj, adj, "ADJ")
                } else {
                    let det = b.push("a", "a", "DET");
                    let noun = *self.pick(&NOUNS);
                    let n = b.push(noun, noun, "NOUN");
                    b.attach(det, n, "det");
                    n
                };
                b.attach(cop, pred, "cop");
                b.attach(subj_head, pred, "nsubj");
                b.attach(pred, 0, "root");
                pred
            }
            AscType::Passive => {
                let aux = b.push("was", "be", "AUX");
                let v = b.push(past, lemma, "VERB");
                b.attach(aux, v, "aux:pass");
                b.attach(subj_head, v, "nsubj:pass");
                if self.rng.random_bool(0.3) {
                    let case = b.push("by", "by", "ADP");
                    let n = self.noun_phrase(&mut b, v, "obl:agent");
                    b.attach(case, n, "case");
                }
                v
            }
            _ => {
                let v = b.push(past, lemma, "VERB");
                b.attach(subj_head, v, "nsubj");
                match t {
                    AscType::Ditran => {
                        let (f, l) = *self.pick(&OBJ_PRONOUNS);
                        b.dep(f, l, "PRON", v, "iobj");
                        self.noun_phrase(&mut b, v, "obj");
                    }
                    AscType::CausMot => {
                        self.noun_phrase(&mut b, v, "obj");
                        self.pp(&mut b, v);
                    }
                    AscType::TranRes => {
                        self.noun_phrase(&mut b, v, "obj");
                        let adj = *self.pick(&ADJECTIVES);
                        b.dep(adj, adj, "ADJ", v, "xcomp");
                    }
                    AscType::TranS => {
                        self.noun_phrase(&mut b, v, "obj");
                    }
                    AscType::IntranMot => self.pp(&mut b, v),
                    AscType::IntranRes => {
                        let adv = *self.pick(&RESULT_ADVERBS);
                        b.dep(adv, adv, "ADV", v, "advmod");
                    }
                    AscType::IntranS => {
                        if self.rng.random_bool(0.2) {
                            b.dep("often", "often", "ADV", v, "advmod");
                        }
                    }
                    AscType::Attr | AscType::Passive => unreachable!(),
                }
                v
            }
        };
        b.attach(pred, 0, "root");
        b.dep(".", ".", "PUNCT", pred, "punct");
        b.finish()
    }

    /// One sentence realizing `t` with a Zipf-drawn verb; also returns the
    /// lemma the tagger should report.
    pub fn clause(&mut self, t: AscType) -> (Sentence, &'static str) {
        let verb = self.verb(t);
        (self.clause_with(t, verb), verb.0)
    }

    /// A sentence with no taggable predicate.
    pub fn distractor(&mut self) -> Sentence {
        let mut b = Builder::new();
        match self.rng.random_range(0..3) {
            // imperative
            0 => {
                let (lemma, _) = self.verb(AscType::TranS);
                let v = b.push(lemma, lemma, "VERB");
                self.noun_phrase(&mut b, v, "obj");
                b.dep(".", ".", "PUNCT", v, "punct");
            }
            // bare noun phrase
            1 => {
                let det = b.push("The", "the", "DET");
                let adj = *self.pick(&ADJECTIVES);
                let a = b.push(adj, adj, "ADJ");
                let noun = *self.pick(&NOUNS);
                let n = b.push(noun, noun, "NOUN");
                b.attach(det, n, "det");
                b.attach(a, n, "amod");
                b.dep(".", ".", "PUNCT", n, "punct");
            }
            // subjectless coordination
            _ => {
                let (l1, _) = self.verb(AscType::IntranS);
                let (l2, _) = self.verb(AscType::IntranS);
                let v1 = b.push(l1, l1, "VERB");
                let cc = b.push("and", "and", "CCONJ");
                let v2 = b.dep(l2, l2, "VERB", v1, "conj");
                b.attach(cc, v2, "cc");
                b.dep(".", ".", "PUNCT", v1, "punct");
            }
        }
        b.finish()
    }

    /// Index into [`AscType::ALL`] drawn from `weights`.
    pub fn asc_type(&mut self, weights: &[f64; 9]) -> AscType {
        let dist = WeightedIndex::new(weights).expect("positive weights");
        AscType::ALL[dist.sample(&mut self.rng)]
    }

    /// A document of `n_clauses` construction sentences with types drawn
    /// from `weights`, plus roughly one distractor per ten clauses.
    pub fn document(&mut self, source_id: &str, n_clauses: usize, weights: &[f64; 9]) -> Document {
        let mut sentences = Vec::with_capacity(n_clauses + n_clauses / 10);
        for _ in 0..n_clauses {
            let t = self.asc_type(weights);
            sentences.push(self.clause(t).0);
            if self.rng.random_bool(0.1) {
                sentences.push(self.distractor());
            }
        }
        Document::new(source_id, sentences)
    }

    /// Uniform in `[0, 1)`; exposed so callers can derive per-document
    /// parameters from the same stream.
    pub fn unit(&mut self) -> f64 {
        self.rng.random()
    }
}

/// Approximate construction-type mix of written English used for the demo
/// norms, in canonical order.
pub const REFERENCE_WEIGHTS: [f64; 9] = [0.22, 0.06, 0.05, 0.10, 0.02, 0.12, 0.07, 0.03, 0.33];

/// Seed and size of the corpus behind the bundled `demo` norm table.
pub const DEMO_SEED: u64 = 20_240_601;
pub const DEMO_DOCUMENTS: usize = 40;
pub const DEMO_CLAUSES_PER_DOCUMENT: usize = 500;

/// Regenerates the corpus the bundled demo norms were counted from.
pub fn demo_corpus() -> Vec<Document> {
    let mut s = Synth::new(DEMO_SEED);
    (0..DEMO_DOCUMENTS)
        .map(|i| {
            s.document(
                &format!("demo-{i:03}"),
                DEMO_CLAUSES_PER_DOCUMENT,
                &REFERENCE_WEIGHTS,
            )
        })
        .collect()
}
