//! Lexicon valence scoring.
//!
//! Each lexicon hit contributes its valence, adjusted by booster words in the
//! three preceding tokens (dampened with distance) and flipped by a negator
//! in the same window. The summed valence `s` is squashed to
//! `s / sqrt(s^2 + alpha)`.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::extraction::Triple;
use crate::resources::{self, parse_pairs, parse_word_list, read_resource};
use crate::textprep::tokenize;

pub const NORMALIZATION_ALPHA: f64 = 15.0;
pub const NEGATION_SCALAR: f64 = -0.74;
const WINDOW: usize = 3;
const BOOSTER_DAMPING: [f64; WINDOW] = [1.0, 0.95, 0.9];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    pub valence: HashMap<String, f64>,
    pub boosters: HashMap<String, f64>,
    pub negators: HashSet<String>,
}

fn parse_values(text: &str, what: &str, bound: f64) -> Result<HashMap<String, f64>> {
    parse_pairs(text)?
        .into_iter()
        .map(|(token, v)| {
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("{what}: bad number `{v}` for `{token}`")))?;
            if !x.is_finite() || x.abs() > bound {
                return Err(Error::input(format!("{what}: `{token}` value {x} outside [-{bound}, {bound}]")));
            }
            Ok((token, x))
        })
        .collect()
}

impl Lexicon {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from the text of the three resource files.
    pub fn parse(valence: &str, boosters: &str, negators: &str) -> Result<Self> {
        Ok(Self {
            valence: parse_values(valence, "valence lexicon", 4.0)?,
            boosters: parse_values(boosters, "booster list", 1.0)?,
            negators: parse_word_list(negators),
        })
    }

    pub fn from_files(valence: &Path, boosters: &Path, negators: &Path) -> Result<Self> {
        Self::parse(
            &read_resource(valence)?,
            &read_resource(boosters)?,
            &read_resource(negators)?,
        )
    }

    /// The lexicon compiled into the crate.
    pub fn bundled() -> &'static Lexicon {
        static CELL: OnceLock<Lexicon> = OnceLock::new();
        CELL.get_or_init(|| {
            Lexicon::parse(resources::VALENCE_LEXICON, resources::BOOSTERS, resources::NEGATORS)
                .expect("bundled lexicon is valid")
        })
    }

    fn is_modifier(&self, token: &str) -> bool {
        self.boosters.contains_key(token) || self.negators.contains(token)
    }

    /// Adjusted valence of the token at `i`, or `None` when it is not a hit.
    fn adjusted_valence(&self, tokens: &[String], i: usize) -> Option<f64> {
        let token = tokens[i].as_str();
        if self.is_modifier(token) {
            return None;
        }
        let base = *self.valence.get(token)?;
        let mut v = base;
        let mut negated = false;
        for d in 1..=WINDOW.min(i) {
            let prev = tokens[i - d].as_str();
            if self.negators.contains(prev) {
                negated = true;
            }
            if self.valence.contains_key(prev) && !self.is_modifier(prev) {
                continue;
            }
            if let Some(&inc) = self.boosters.get(prev) {
                v += inc * base.signum() * BOOSTER_DAMPING[d - 1];
            }
        }
        if negated {
            v *= NEGATION_SCALAR;
        }
        Some(v)
    }

    /// Sum of adjusted valences and the number of lexicon hits.
    pub fn raw_valence(&self, text: &str) -> (f64, usize) {
        let tokens = tokenize(text);
        (0..tokens.len())
            .filter_map(|i| self.adjusted_valence(&tokens, i))
            .fold((0.0, 0), |(s, n), v| (s + v, n + 1))
    }

    pub fn score_text(&self, text: &str) -> f64 {
        let (s, hits) = self.raw_valence(text);
        if hits == 0 {
            return 0.0;
        }
        compound(s)
    }

    pub fn score_triple(&self, t: &Triple) -> f64 {
        self.score_text(&format!("{} {} {}", t.subject, t.predicate, t.object))
    }
}

pub fn compound(sum: f64) -> f64 {
    sum / (sum * sum + NORMALIZATION_ALPHA).sqrt()
}

pub fn score_text(text: &str, lex: &Lexicon) -> f64 {
    lex.score_text(text)
}

pub fn score_triple(t: &Triple, lex: &Lexicon) -> f64 {
    lex.score_triple(t)
}
