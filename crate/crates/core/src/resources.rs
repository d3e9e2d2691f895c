//! Bundled lookup tables.
//!
//! All tables are compiled into the binary so results do not depend on the
//! working directory. Each table can also be loaded from a file with the same
//! format.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const STOPWORDS: &str = include_str!("../data/stopwords.txt");
pub const CONTRACTIONS: &str = include_str!("../data/contractions.tsv");
pub const CONTRACTION_SUFFIXES: &str = include_str!("../data/contraction_suffixes.tsv");
pub const LEMMA_EXCEPTIONS: &str = include_str!("../data/lemma_exceptions.tsv");
pub const SYNONYMS: &str = include_str!("../data/synonyms.tsv");
pub const AMENITIES: &str = include_str!("../data/amenities.txt");
pub const VALENCE_LEXICON: &str = include_str!("../data/valence_lexicon.tsv");
pub const BOOSTERS: &str = include_str!("../data/boosters.tsv");
pub const NEGATORS: &str = include_str!("../data/negators.txt");

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
}

pub fn parse_word_list(text: &str) -> HashSet<String> {
    content_lines(text).map(|l| l.trim().to_string()).collect()
}

/// Parse `key<TAB>value` lines. Lines without a tab are rejected.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    content_lines(text)
        .enumerate()
        .map(|(i, line)| {
            line.split_once('\t')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::input(format!("line {}: expected key<TAB>value", i + 1)))
        })
        .collect()
}

pub fn read_resource(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn stopwords() -> &'static HashSet<String> {
    static CELL: OnceLock<HashSet<String>> = OnceLock::new();
    CELL.get_or_init(|| parse_word_list(STOPWORDS))
}

pub fn lemma_exceptions() -> &'static HashMap<String, String> {
    static CELL: OnceLock<HashMap<String, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        parse_pairs(LEMMA_EXCEPTIONS)
            .expect("bundled lemma table")
            .into_iter()
            .collect()
    })
}

pub fn contractions() -> &'static HashMap<String, String> {
    static CELL: OnceLock<HashMap<String, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        parse_pairs(CONTRACTIONS)
            .expect("bundled contraction table")
            .into_iter()
            .collect()
    })
}

pub fn contraction_suffixes() -> &'static [(String, String)] {
    static CELL: OnceLock<Vec<(String, String)>> = OnceLock::new();
    CELL.get_or_init(|| parse_pairs(CONTRACTION_SUFFIXES).expect("bundled suffix table"))
}

/// Synonym phrases keyed by their lemmatised word sequence.
pub fn synonyms() -> &'static HashMap<Vec<String>, String> {
    static CELL: OnceLock<HashMap<Vec<String>, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        parse_pairs(SYNONYMS)
            .expect("bundled synonym table")
            .into_iter()
            .map(|(k, v)| (k.split_whitespace().map(crate::textprep::lemmatize).collect(), v))
            .collect()
    })
}

pub fn amenities() -> HashSet<String> {
    parse_word_list(AMENITIES)
}
