//! Text normalisation variants.
//!
//! * [`prepare_classic`]: lowercase, strip punctuation, drop stopwords, lemmatise.
//!   Used for bag-of-words and TF-IDF.
//! * [`prepare_word2vec`]: lowercase and strip punctuation only.
//! * [`prepare_graph_text`]: keeps casing and sentence punctuation for triple
//!   extraction; expands contractions and removes markup.

use std::sync::OnceLock;

use regex::Regex;

use crate::resources;

/// Ordered lowercase tokens without whitespace or empty entries.
pub type TokenList = Vec<String>;

/// Pluggable language normalisation applied before graph preprocessing.
pub trait Translator: Send + Sync {
    fn translate(&self, text: &str) -> Result<String, String>;
}

/// The default translator: returns its input unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Translator for Identity {
    fn translate(&self, text: &str) -> Result<String, String> {
        Ok(text.to_string())
    }
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{2018}' | '`')
}

fn is_hyphen(c: char) -> bool {
    matches!(c, '-' | '\u{2010}' | '\u{2011}')
}

/// Lowercase, delete hyphens and apostrophes, replace every other
/// non-alphanumeric character with a space, then split on whitespace.
pub fn tokenize(text: &str) -> TokenList {
    let mut cleaned = String::with_capacity(text.len());
    for c in text.chars() {
        if is_hyphen(c) || is_apostrophe(c) {
            continue;
        }
        if c.is_alphanumeric() {
            cleaned.extend(c.to_lowercase());
        } else {
            cleaned.push(' ');
        }
    }
    cleaned.split_whitespace().map(str::to_string).collect()
}

pub fn prepare_word2vec(text: &str) -> TokenList {
    tokenize(text)
}

pub fn is_stopword(token: &str) -> bool {
    resources::stopwords().contains(token)
}

pub fn prepare_classic(text: &str) -> TokenList {
    tokenize(text)
        .into_iter()
        .filter(|t| !is_stopword(t))
        .map(|t| lemmatize(&t))
        .filter(|t| !t.is_empty() && !is_stopword(t))
        .collect()
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u' | b'y')
}

fn has_vowel(s: &str) -> bool {
    s.bytes().any(is_vowel)
}

fn undouble(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 2 && b[n - 1] == b[n - 2] && !is_vowel(b[n - 1]) && !matches!(b[n - 1], b'l' | b's' | b'z') {
        stem[..n - 1].to_string()
    } else {
        stem.to_string()
    }
}

fn lemma_step(word: &str) -> String {
    if let Some(l) = resources::lemma_exceptions().get(word) {
        return l.clone();
    }
    if !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    let n = word.len();
    if n > 4 && word.ends_with("ies") {
        return format!("{}y", &word[..n - 3]);
    }
    if word.ends_with("sses") {
        return word[..n - 2].to_string();
    }
    if n > 4 && ["ches", "shes", "xes", "zes"].iter().any(|s| word.ends_with(s)) {
        return word[..n - 2].to_string();
    }
    if n > 3 && word.ends_with('s') && !["ss", "us", "is"].iter().any(|s| word.ends_with(s)) {
        return word[..n - 1].to_string();
    }
    if let Some(stem) = word.strip_suffix("ing") {
        if stem.len() >= 3 && has_vowel(stem) {
            return undouble(stem);
        }
    }
    if let Some(stem) = word.strip_suffix("ied") {
        if stem.len() >= 2 {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = word.strip_suffix("ed") {
        if stem.len() >= 3 && has_vowel(stem) {
            return undouble(stem);
        }
    }
    word.to_string()
}

/// Reduce a lowercase token to its lemma with the bundled exception table and
/// regular suffix rules (plural `-s`/`-es`/`-ies`, `-ing`, `-ed`).
///
/// Rules are applied until a fixed point, so the result is itself a lemma.
pub fn lemmatize(word: &str) -> String {
    let mut current = word.to_string();
    for _ in 0..8 {
        let next = lemma_step(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn contraction_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[A-Za-z]+['\u{2019}][A-Za-z]+").unwrap())
}

fn html_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"<[^<>]*>").unwrap())
}

fn match_case(template: &str, expansion: &str) -> String {
    let letters: Vec<char> = template.chars().filter(|c| c.is_alphabetic()).collect();
    if letters.len() > 1 && letters.iter().all(|c| c.is_uppercase()) {
        return expansion.to_uppercase();
    }
    match template.chars().next() {
        Some(c) if c.is_uppercase() => {
            let mut chars = expansion.chars();
            match chars.next() {
                Some(first) => first.to_uppercase().chain(chars).collect(),
                None => String::new(),
            }
        }
        _ => expansion.to_string(),
    }
}

fn expand_one(word: &str) -> Option<String> {
    let lower = word.to_lowercase().replace('\u{2019}', "'");
    if let Some(full) = resources::contractions().get(&lower) {
        return Some(match_case(word, full));
    }
    for (suffix, expansion) in resources::contraction_suffixes() {
        if let Some(stem) = lower.strip_suffix(suffix.as_str()) {
            if !stem.is_empty() {
                let stem_orig: String = word.chars().take(stem.chars().count()).collect();
                let tail = if word.chars().skip(1).all(|c| !c.is_lowercase()) && word.len() > 2 {
                    expansion.to_uppercase()
                } else {
                    expansion.clone()
                };
                return Some(format!("{stem_orig}{tail}"));
            }
        }
    }
    None
}

pub fn expand_contractions(text: &str) -> String {
    contraction_re()
        .replace_all(text, |caps: &regex::Captures| {
            let m = &caps[0];
            expand_one(m).unwrap_or_else(|| m.to_string())
        })
        .into_owned()
}

fn is_sentence_punct(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | ',' | ';' | ':')
}

/// Graph-extraction preprocessing. Casing is preserved.
///
/// Steps: translation (identity by default, falls back to the input on
/// failure), contraction expansion, markup removal, deletion of hyphens,
/// apostrophes and double quotes, a single space after sentence punctuation
/// directly followed by a letter, and whitespace collapsing.
pub fn prepare_graph_text(text: &str, translator: Option<&dyn Translator>) -> String {
    let translated = match translator {
        Some(t) => t.translate(text).unwrap_or_else(|e| {
            log::warn!("translation failed, keeping original text: {e}");
            text.to_string()
        }),
        None => text.to_string(),
    };
    let expanded = expand_contractions(&translated);
    let mut stripped = expanded;
    while html_re().is_match(&stripped) {
        stripped = html_re().replace_all(&stripped, " ").into_owned();
    }

    let removed: String = stripped
        .chars()
        .filter(|&c| !(is_hyphen(c) || is_apostrophe(c) || matches!(c, '"' | '\u{201C}' | '\u{201D}')))
        .collect();
    let mut out = String::with_capacity(removed.len() + 8);
    let mut chars = removed.chars().peekable();
    while let Some(c) = chars.next() {
        out.push(c);
        if is_sentence_punct(c) && chars.peek().is_some_and(|n| n.is_alphabetic()) {
            out.push(' ');
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn toks(v: &[&str]) -> TokenList {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn classic_examples() {
        assert_eq!(prepare_classic("The rooms were great!"), toks(&["room", "great"]));
        assert_eq!(prepare_classic(""), TokenList::new());
        assert_eq!(prepare_classic("running running"), toks(&["run", "run"]));
    }

    #[test]
    fn word2vec_examples() {
        assert_eq!(prepare_word2vec("The rooms were great!"), toks(&["the", "rooms", "were", "great"]));
        assert_eq!(prepare_word2vec(""), TokenList::new());
        assert_eq!(prepare_word2vec("Wi-Fi speed"), toks(&["wifi", "speed"]));
    }

    #[test]
    fn graph_examples() {
        assert_eq!(prepare_graph_text("can't", None), "cannot");
        assert_eq!(prepare_graph_text("Great!Room was fine.", None), "Great! Room was fine.");
        assert_eq!(prepare_graph_text("", None), "");
    }

    #[test]
    fn graph_prep_details() {
        assert_eq!(prepare_graph_text("We didn't like the <b>Wi-Fi</b>", None), "We did not like the WiFi");
        assert_eq!(prepare_graph_text("Can't wait", None), "Cannot wait");
        assert_eq!(prepare_graph_text("the hotel's pool", None), "the hotels pool");
        assert_eq!(prepare_graph_text("It cost 4.5 euros", None), "It cost 4.5 euros");
    }

    struct Failing;
    impl Translator for Failing {
        fn translate(&self, _: &str) -> Result<String, String> {
            Err("offline".into())
        }
    }

    #[test]
    fn translator_failure_passes_through() {
        assert_eq!(prepare_graph_text("Bed was fine", Some(&Failing)), "Bed was fine");
        assert_eq!(prepare_graph_text("Bed was fine", Some(&Identity)), "Bed was fine");
    }

    #[test]
    fn lemma_rules() {
        for (w, l) in [
            ("rooms", "room"),
            ("stories", "story"),
            ("boxes", "box"),
            ("stayed", "stay"),
            ("tried", "try"),
            ("running", "run"),
            ("children", "child"),
            ("glass", "glass"),
            ("bus", "bus"),
            ("was", "was"),
            ("5night", "5night"),
        ] {
            assert_eq!(lemmatize(w), l, "{w}");
        }
    }

    #[test]
    fn lemma_table_values_are_fixed_points() {
        for lemma in resources::lemma_exceptions().values() {
            assert_eq!(&lemmatize(lemma), lemma);
        }
    }

    proptest! {
        #[test]
        fn word2vec_idempotent(s in "[A-Za-z0-9 ,.!?'-]{0,60}") {
            let once = prepare_word2vec(&s);
            prop_assert_eq!(prepare_word2vec(&once.join(" ")), once.clone());
            for t in &once {
                prop_assert!(!t.is_empty() && !t.contains(char::is_whitespace));
                prop_assert_eq!(t.to_lowercase(), t.clone());
            }
        }

        #[test]
        fn classic_idempotent(s in "[A-Za-z ,.!?'-]{0,60}") {
            let once = prepare_classic(&s);
            prop_assert_eq!(prepare_classic(&once.join(" ")), once);
        }

        #[test]
        fn graph_idempotent(s in "[A-Za-z<> ,.!?'-]{0,60}") {
            let once = prepare_graph_text(&s, None);
            prop_assert_eq!(prepare_graph_text(&once, None), once);
        }

        #[test]
        fn classic_vocab_within_word2vec_modulo_lemmas(s in "[A-Za-z ,.!?'-]{0,60}") {
            let lemmas: Vec<String> = prepare_word2vec(&s).iter().map(|t| lemmatize(t)).collect();
            for t in prepare_classic(&s) {
                prop_assert!(lemmas.contains(&t));
            }
        }
    }
}
