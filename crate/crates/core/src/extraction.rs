//! Subject/predicate/object triples.
//!
//! Triples come either from the built-in pattern extractor or from an external
//! CSV. Before entering the graph every term is normalised and triples with
//! over-long terms are dropped.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resources;
use crate::textprep::lemmatize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub review_id: usize,
    pub subject: String,
    pub predicate: String,
    pub object: String,
    /// Compound valence in [-1, 1], when scored.
    pub sentiment: Option<f64>,
}

impl Triple {
    pub fn new(review_id: usize, subject: &str, predicate: &str, object: &str) -> Self {
        Self {
            review_id,
            subject: subject.to_string(),
            predicate: predicate.to_string(),
            object: object.to_string(),
            sentiment: None,
        }
    }

    pub fn with_sentiment(mut self, s: f64) -> Self {
        self.sentiment = Some(s);
        self
    }

    pub fn terms(&self) -> [&str; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

// ---------------------------------------------------------------------------
// Pattern extractor

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pos {
    Det,
    Adj,
    Noun,
    Pron,
    Copula,
    Prep,
    Verb,
    Adv,
    Other,
}

/// Determiners removed from the front of a noun phrase.
const DROPPED_DETERMINERS: &[&str] = &["the", "a", "an", "this", "that", "these", "those"];

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "my", "our", "your", "his", "her", "its", "their", "some",
    "any", "every", "each", "all", "both", "another", "no",
];

const PRONOUNS: &[&str] = &[
    "i", "we", "you", "he", "she", "it", "they", "me", "us", "them", "him", "everyone", "everything", "nothing",
    "something", "someone", "anyone", "everybody",
];

const COPULAS: &[&str] = &["is", "was", "were", "are", "am", "be", "been", "being"];

const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "by", "with", "for", "from", "to", "of", "near", "about", "over", "under", "into", "onto",
    "through", "during", "after", "before", "behind", "between", "across", "along", "around", "within", "without",
    "outside", "inside", "against", "towards", "toward", "beside", "next", "opposite", "like", "than", "off", "up",
    "down", "out",
];

const ADVERBS: &[&str] = &[
    "very", "too", "really", "so", "quite", "extremely", "pretty", "rather", "well", "also", "just", "always",
    "never", "not", "absolutely", "incredibly", "super", "most", "more", "less", "fairly", "somewhat", "still",
    "even", "again", "already", "almost", "especially", "truly", "highly", "totally", "simply",
];

const OTHER: &[&str] = &[
    "and", "or", "but", "so", "because", "if", "then", "though", "although", "while", "will", "would", "can",
    "could", "should", "must", "may", "might", "shall", "do", "does", "did", "there", "here", "when", "where",
    "which", "who", "whom", "what", "why", "how", "as", "yes", "please", "thanks", "thank",
];

const ADJECTIVES: &[&str] = &[
    "great", "good", "nice", "clean", "dirty", "bad", "poor", "excellent", "friendly", "small", "big", "large",
    "huge", "tiny", "new", "old", "quiet", "noisy", "loud", "lovely", "perfect", "fine", "fantastic", "terrible",
    "awful", "horrible", "amazing", "rude", "cheap", "central", "convenient", "pleasant", "warm", "cold", "hot",
    "modern", "cozy", "cosy", "fresh", "tasty", "free", "close", "far", "easy", "hard", "best", "worst", "better",
    "worse", "first", "last", "only", "same", "other", "many", "much", "few", "several", "whole", "entire", "full",
    "empty", "busy", "safe", "slow", "fast", "high", "low", "short", "long", "wrong", "right", "sure", "happy",
    "sad", "superb", "decent", "average", "basic", "okay", "ok", "historical", "local", "special", "main", "own",
    "little", "top", "real", "nearby", "minor", "major", "dark", "bright", "light", "extra", "cramped", "stale",
    "smelly", "ugly", "dated", "outdated", "overpriced", "broken", "superb", "outstanding", "stunning", "charming",
    "disappointing", "relaxing", "welcoming", "boring", "crowded", "impressed", "satisfied", "disappointed",
    "pleased", "tired", "unhelpful", "slow", "filthy", "mediocre", "spotless", "tidy", "gorgeous", "brilliant",
    "wonderful", "beautiful", "delicious", "spacious", "comfortable", "helpful",
];

const ADJECTIVE_SUFFIXES: &[&str] = &["ful", "ous", "able", "ible", "ive", "less", "ic", "ish", "est"];

const VERBS: &[&str] = &[
    "had", "has", "have", "got", "get", "loved", "liked", "enjoyed", "enjoy", "found", "booked", "recommend",
    "recommended", "offers", "offered", "offer", "provided", "provides", "includes", "included", "serves",
    "served", "keeps", "kept", "needs", "needed", "brought", "moved", "made", "makes", "took", "gave", "saw",
    "visited", "stayed", "hated", "paid", "used", "requested", "asked", "told", "wanted", "expected", "received",
    "ordered", "upgraded", "welcomed", "greeted", "helped", "hosted", "lacks", "lacked", "charged", "cleaned",
    "changed", "fixed", "overlooks", "overlooked", "features", "boasts", "deserves", "missed", "spent", "checked",
    "called", "ruined", "spoiled", "love", "like", "hate", "want", "need", "lacks", "appreciated", "appreciate",
    "adored",
];

fn in_list(list: &[&str], w: &str) -> bool {
    list.contains(&w)
}

fn guess_pos(token: &str) -> Pos {
    let w = token.to_lowercase();
    let w = w.as_str();
    if in_list(DETERMINERS, w) {
        Pos::Det
    } else if in_list(PRONOUNS, w) {
        Pos::Pron
    } else if in_list(COPULAS, w) {
        Pos::Copula
    } else if in_list(PREPOSITIONS, w) {
        Pos::Prep
    } else if in_list(ADVERBS, w) {
        Pos::Adv
    } else if in_list(OTHER, w) {
        Pos::Other
    } else if in_list(ADJECTIVES, w) {
        Pos::Adj
    } else if in_list(VERBS, w) {
        Pos::Verb
    } else if w.starts_with(|c: char| c.is_ascii_digit()) {
        Pos::Adj
    } else if w.len() > 4 && w.ends_with("ly") && w != "family" && w != "july" && w != "italy" {
        Pos::Adv
    } else if ADJECTIVE_SUFFIXES.iter().any(|s| w.len() > s.len() + 2 && w.ends_with(s)) {
        Pos::Adj
    } else if w.len() > 4 && w.ends_with("ed") {
        Pos::Verb
    } else {
        Pos::Noun
    }
}

struct Tagged<'a> {
    word: &'a str,
    pos: Pos,
}

fn is_participle(t: &Tagged) -> bool {
    t.pos == Pos::Verb && t.word.to_lowercase().ends_with("ed")
}

/// Render a phrase, dropping leading articles and demonstratives unless that
/// would leave nothing.
fn phrase(tokens: &[Tagged]) -> String {
    let skip = tokens
        .iter()
        .take_while(|t| in_list(DROPPED_DETERMINERS, &t.word.to_lowercase()))
        .count();
    let kept = if skip == tokens.len() { tokens } else { &tokens[skip..] };
    kept.iter().map(|t| t.word).collect::<Vec<_>>().join(" ")
}

/// Maximal noun phrase starting at `i`: a pronoun, or a run of
/// determiner/adjective/noun tokens containing a noun. A run of determiners
/// alone counts when it is followed by a verb or copula ("This is ...").
fn noun_phrase(tags: &[Tagged], i: usize) -> Option<usize> {
    let first = tags.get(i)?;
    if first.pos == Pos::Pron {
        return Some(i + 1);
    }
    let mut end = i;
    while end < tags.len() && matches!(tags[end].pos, Pos::Det | Pos::Adj | Pos::Noun) {
        end += 1;
    }
    if end == i {
        return None;
    }
    let run = &tags[i..end];
    if run.iter().any(|t| t.pos == Pos::Noun) {
        return Some(end);
    }
    let followed_by_verb = tags
        .get(end)
        .is_some_and(|t| matches!(t.pos, Pos::Copula | Pos::Verb));
    (run.iter().all(|t| t.pos == Pos::Det) && followed_by_verb).then_some(end)
}

/// Object phrase: pronoun or determiner/adjective/noun run with a content word.
fn object_phrase(tags: &[Tagged], i: usize) -> Option<usize> {
    let first = tags.get(i)?;
    if first.pos == Pos::Pron {
        return Some(i + 1);
    }
    let mut end = i;
    while end < tags.len() && matches!(tags[end].pos, Pos::Det | Pos::Adj | Pos::Noun) {
        end += 1;
    }
    tags[i..end]
        .iter()
        .any(|t| matches!(t.pos, Pos::Adj | Pos::Noun))
        .then_some(end)
}

/// Copula complement: adverbs, determiners, adjectives, nouns and participles,
/// with at least one content word.
fn complement(tags: &[Tagged], i: usize) -> Option<usize> {
    let mut end = i;
    while end < tags.len()
        && (matches!(tags[end].pos, Pos::Det | Pos::Adj | Pos::Noun | Pos::Adv) || is_participle(&tags[end]))
    {
        end += 1;
    }
    tags[i..end]
        .iter()
        .any(|t| matches!(t.pos, Pos::Adj | Pos::Noun) || is_participle(t))
        .then_some(end)
}

fn extract_clause(review_id: usize, clause: &str, out: &mut Vec<Triple>) {
    let tags: Vec<Tagged> = clause
        .split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|w| !w.is_empty())
        .map(|word| Tagged {
            word,
            pos: guess_pos(word),
        })
        .collect();

    let mut i = 0;
    while i < tags.len() {
        let Some(np_end) = noun_phrase(&tags, i) else {
            i += 1;
            continue;
        };
        let subject = phrase(&tags[i..np_end]);
        let Some(next) = tags.get(np_end) else { break };
        match next.pos {
            Pos::Copula => {
                // copula + preposition + NP
                if tags.get(np_end + 1).is_some_and(|t| t.pos == Pos::Prep) {
                    if let Some(obj_end) = object_phrase(&tags, np_end + 2) {
                        let predicate = format!("{} {}", next.word, tags[np_end + 1].word);
                        out.push(Triple::new(review_id, &subject, &predicate, &phrase(&tags[np_end + 2..obj_end])));
                        i = obj_end;
                        continue;
                    }
                }
                // copula + complement
                if let Some(c_end) = complement(&tags, np_end + 1) {
                    out.push(Triple::new(review_id, &subject, next.word, &phrase(&tags[np_end + 1..c_end])));
                    i = c_end;
                    continue;
                }
            }
            Pos::Verb => {
                if let Some(obj_end) = object_phrase(&tags, np_end + 1) {
                    out.push(Triple::new(review_id, &subject, next.word, &phrase(&tags[np_end + 1..obj_end])));
                    i = obj_end;
                    continue;
                }
            }
            _ => {}
        }
        i = np_end;
    }
}

fn is_clause_break(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | ';' | ',' | ':')
}

/// Extract triples from one prepared sentence with the three patterns
/// (copula + complement, copula + preposition + NP, NP + verb + NP).
/// Clause punctuation inside the sentence bounds every pattern.
pub fn extract_triples(sentence: &str) -> Vec<Triple> {
    extract_triples_for(0, sentence)
}

pub fn extract_triples_for(review_id: usize, text: &str) -> Vec<Triple> {
    let mut out = Vec::new();
    for clause in text.split(is_clause_break) {
        extract_clause(review_id, clause, &mut out);
    }
    out
}

// ---------------------------------------------------------------------------
// Normalisation and filtering

/// Normalise a term into a graph node / relation name.
///
/// Lowercases, replaces punctuation and symbols with spaces, lemmatises each
/// word, maps synonym phrases and joins words with `_`. Returns `None` when
/// nothing survives, which means the term (and its triple) is dropped.
pub fn normalize_term(s: &str) -> Option<String> {
    let cleaned: String = s
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .to_lowercase();
    let words: Vec<String> = cleaned.split_whitespace().map(lemmatize).collect();
    if words.is_empty() {
        return None;
    }
    let table = resources::synonyms();
    let max_phrase = table.keys().map(Vec::len).max().unwrap_or(1);
    let mut out: Vec<String> = Vec::with_capacity(words.len());
    let mut i = 0;
    'outer: while i < words.len() {
        for len in (1..=max_phrase.min(words.len() - i)).rev() {
            if let Some(canon) = table.get(&words[i..i + len]) {
                out.push(canon.clone());
                i += len;
                continue 'outer;
            }
        }
        out.push(words[i].clone());
        i += 1;
    }
    Some(out.join("_"))
}

/// Where the over-long term cut-off sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthBoundary {
    /// Discard terms with `len >= limit`.
    AtLeast,
    /// Discard terms with `len > limit`.
    MoreThan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermFilter {
    pub limit: usize,
    pub boundary: LengthBoundary,
}

impl Default for TermFilter {
    fn default() -> Self {
        Self {
            limit: 14,
            boundary: LengthBoundary::AtLeast,
        }
    }
}

impl TermFilter {
    pub fn rejects(&self, term: &str) -> bool {
        let n = term.chars().count();
        match self.boundary {
            LengthBoundary::AtLeast => n >= self.limit,
            LengthBoundary::MoreThan => n > self.limit,
        }
    }

    pub fn keeps(&self, t: &Triple) -> bool {
        t.terms().iter().all(|term| !self.rejects(term))
    }
}

/// Drop triples with any over-long (already normalised) term.
pub fn filter_triples(triples: Vec<Triple>, filter: &TermFilter) -> Vec<Triple> {
    triples.into_iter().filter(|t| filter.keeps(t)).collect()
}

pub fn normalize_triple(t: &Triple) -> Option<Triple> {
    Some(Triple {
        review_id: t.review_id,
        subject: normalize_term(&t.subject)?,
        predicate: normalize_term(&t.predicate)?,
        object: normalize_term(&t.object)?,
        sentiment: t.sentiment,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepareCounts {
    pub input: usize,
    pub dropped_empty: usize,
    pub dropped_length: usize,
    pub kept: usize,
}

/// Normalise every triple, drop those with empty or over-long terms.
pub fn normalize_and_filter(triples: &[Triple], filter: &TermFilter) -> (Vec<Triple>, PrepareCounts) {
    let mut counts = PrepareCounts {
        input: triples.len(),
        ..Default::default()
    };
    let mut kept = Vec::with_capacity(triples.len());
    for t in triples {
        match normalize_triple(t) {
            None => counts.dropped_empty += 1,
            Some(n) if !filter.keeps(&n) => counts.dropped_length += 1,
            Some(n) => kept.push(n),
        }
    }
    counts.kept = kept.len();
    (kept, counts)
}

// ---------------------------------------------------------------------------
// CSV I/O

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ImportedTriples {
    pub triples: Vec<Triple>,
    pub skipped: usize,
}

pub fn write_triples_csv<W: Write>(writer: W, triples: &[Triple]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(writer);
    w.write_record(["review_id", "subject", "predicate", "object", "sentiment"])?;
    for t in triples {
        let sentiment = t.sentiment.map(|s| s.to_string()).unwrap_or_default();
        w.write_record([
            t.review_id.to_string().as_str(),
            &t.subject,
            &t.predicate,
            &t.object,
            &sentiment,
        ])?;
    }
    w.flush().map_err(|e| Error::io("<triples csv>", e))?;
    Ok(())
}

pub fn export_triples(path: &Path, triples: &[Triple]) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_triples_csv(f, triples)
}

pub fn read_triples_csv<R: std::io::Read>(reader: R) -> Result<ImportedTriples> {
    let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = r.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let missing: Vec<&str> = ["review_id", "subject", "predicate", "object"]
        .into_iter()
        .filter(|c| col(c).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(Error::input(format!("triple CSV lacks column(s): {}", missing.join(", "))));
    }
    let (ci, cs, cp, co) = (
        col("review_id").unwrap(),
        col("subject").unwrap(),
        col("predicate").unwrap(),
        col("object").unwrap(),
    );
    let csent = col("sentiment");

    let mut out = ImportedTriples::default();
    for record in r.records() {
        let Ok(record) = record else {
            out.skipped += 1;
            continue;
        };
        let parsed = (|| {
            let review_id = record.get(ci)?.trim().parse::<usize>().ok()?;
            let field = |c: usize| record.get(c).map(str::to_string).filter(|s| !s.trim().is_empty());
            let sentiment = match csent.and_then(|c| record.get(c)).map(str::trim) {
                None | Some("") => None,
                Some(s) => {
                    let v = s.parse::<f64>().ok()?;
                    if !(-1.0..=1.0).contains(&v) {
                        return None;
                    }
                    Some(v)
                }
            };
            Some(Triple {
                review_id,
                subject: field(cs)?,
                predicate: field(cp)?,
                object: field(co)?,
                sentiment,
            })
        })();
        match parsed {
            Some(t) => out.triples.push(t),
            None => out.skipped += 1,
        }
    }
    if out.skipped > 0 {
        log::warn!("skipped {} malformed triple rows", out.skipped);
    }
    Ok(out)
}

pub fn import_triples(path: &Path) -> Result<ImportedTriples> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_triples_csv(f)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn spo(t: &Triple) -> (&str, &str, &str) {
        (&t.subject, &t.predicate, &t.object)
    }

    #[test]
    fn copula_adjective() {
        let ts = extract_triples("The bed was comfortable");
        assert_eq!(ts.len(), 1);
        assert_eq!(spo(&ts[0]), ("bed", "was", "comfortable"));
        assert!(ts[0].sentiment.is_none());
    }

    #[test]
    fn empty_sentence() {
        assert!(extract_triples("").is_empty());
        assert!(extract_triples("and then").is_empty());
    }

    #[test]
    fn copula_preposition() {
        let ts = extract_triples("Great pool is in wonderful spot by beach");
        assert_eq!(ts.len(), 1);
        assert_eq!(spo(&ts[0]), ("Great pool", "is in", "wonderful spot"));
    }

    #[test]
    fn transitive_verb() {
        let ts = extract_triples("We had 5night stay");
        assert_eq!(spo(&ts[0]), ("We", "had", "5night stay"));
    }

    #[test]
    fn multiple_clauses_in_order() {
        let ts = extract_triples("The room was very clean, the staff were not friendly. This is our 4th year");
        let got: Vec<_> = ts.iter().map(spo).collect();
        assert_eq!(
            got,
            vec![
                ("room", "was", "very clean"),
                ("staff", "were", "not friendly"),
                ("This", "is", "our 4th year"),
            ]
        );
    }

    #[test]
    fn copula_participle_and_pronoun() {
        let ts = extract_triples("we were most impressed");
        assert_eq!(spo(&ts[0]), ("we", "were", "most impressed"));
        let ts = extract_triples("it is too much trouble");
        assert_eq!(spo(&ts[0]), ("it", "is", "too much trouble"));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_term("Great pool").as_deref(), Some("great_pool"));
        assert_eq!(normalize_term("Rooms").as_deref(), Some("room"));
        assert_eq!(normalize_term("!!!"), None);
        assert_eq!(normalize_term("Wi-Fi").as_deref(), Some("wifi"));
        assert_eq!(normalize_term("wi fi").as_deref(), Some("wifi"));
        assert_eq!(normalize_term("very poor wireless internet service").as_deref(), Some("very_poor_wifi_service"));
        assert_eq!(normalize_term("is in").as_deref(), Some("is_in"));
    }

    #[test]
    fn synonym_targets_are_fixed_points() {
        for canon in resources::synonyms().values() {
            assert_eq!(normalize_term(canon).as_deref(), Some(canon.as_str()));
        }
    }

    #[test]
    fn length_filter_boundaries() {
        let f = TermFilter::default();
        let keep = Triple::new(0, "bed", "was", "comfortable");
        let long = Triple::new(0, "great_pool", "is_in", "wonderful_spot_by_beach");
        let fourteen = Triple::new(0, "abcdefghijklmn", "is", "x");
        assert_eq!(filter_triples(vec![keep.clone(), long, fourteen.clone()], &f), vec![keep.clone()]);
        let lax = TermFilter {
            boundary: LengthBoundary::MoreThan,
            ..f
        };
        assert!(lax.keeps(&fourteen));
        assert!(!lax.rejects("abcdefghijklmn"));
        assert!(lax.rejects("abcdefghijklmno"));
    }

    #[test]
    fn csv_fixture_and_optional_sentiment() {
        let data = "review_id,subject,predicate,object,sentiment\n1,bed,was,\"comfy, soft\",0.5\n2,we,had,stay,\n";
        let got = read_triples_csv(data.as_bytes()).unwrap();
        assert_eq!(got.skipped, 0);
        assert_eq!(got.triples.len(), 2);
        assert_eq!(got.triples[0].object, "comfy, soft");
        assert_eq!(got.triples[0].sentiment, Some(0.5));
        assert_eq!(got.triples[1].sentiment, None);

        let no_col = "review_id,subject,predicate,object\n3,a,b,c\n";
        let got = read_triples_csv(no_col.as_bytes()).unwrap();
        assert_eq!(got.triples[0].sentiment, None);
    }

    #[test]
    fn csv_missing_column_and_bad_rows() {
        let err = read_triples_csv("review_id,subject,object\n1,a,b\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
        let data = "review_id,subject,predicate,object,sentiment\nx,a,b,c,0\n1,,b,c,0\n1,a,b,c,2.0\n1,a,b,c,0.1\n";
        let got = read_triples_csv(data.as_bytes()).unwrap();
        assert_eq!(got.skipped, 3);
        assert_eq!(got.triples.len(), 1);
    }

    fn arb_triple() -> impl Strategy<Value = Triple> {
        (
            0usize..10_000,
            "[A-Za-z ,\"']{1,12}",
            "[a-z ]{1,8}",
            "[A-Za-z0-9 ,]{1,12}",
            prop::option::of(-1.0f64..=1.0),
        )
            .prop_filter("non-blank terms", |(_, s, p, o, _)| {
                !s.trim().is_empty() && !p.trim().is_empty() && !o.trim().is_empty()
            })
            .prop_map(|(id, s, p, o, sent)| Triple {
                review_id: id,
                subject: s,
                predicate: p,
                object: o,
                sentiment: sent,
            })
    }

    proptest! {
        #[test]
        fn csv_round_trip(ts in prop::collection::vec(arb_triple(), 0..20)) {
            let mut buf = Vec::new();
            write_triples_csv(&mut buf, &ts).unwrap();
            let back = read_triples_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.skipped, 0);
            prop_assert_eq!(back.triples, ts);
        }

        #[test]
        fn extraction_is_deterministic(s in "[A-Za-z ,.]{0,80}") {
            prop_assert_eq!(extract_triples(&s), extract_triples(&s));
        }

        #[test]
        fn kept_terms_have_bounded_length(ts in prop::collection::vec(arb_triple(), 0..20)) {
            let (kept, counts) = normalize_and_filter(&ts, &TermFilter::default());
            prop_assert_eq!(counts.kept + counts.dropped_empty + counts.dropped_length, ts.len());
            for t in kept {
                for term in t.terms() {
                    let n = term.chars().count();
                    prop_assert!((1..=13).contains(&n));
                }
            }
        }

        #[test]
        fn normalize_idempotent(s in "[A-Za-z -]{0,30}") {
            if let Some(n) = normalize_term(&s) {
                prop_assert_eq!(normalize_term(&n), Some(n.clone()));
            }
        }
    }
}
