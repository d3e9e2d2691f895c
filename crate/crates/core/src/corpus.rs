//! Review ingestion and corpus statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// One review with the fields the pipeline keeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewRecord {
    /// 0-based line position in the source file.
    pub review_id: usize,
    pub hotel_id: String,
    pub rating: u8,
    pub title: String,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadedCorpus {
    pub records: Vec<ReviewRecord>,
    /// Lines that were not valid reviews (malformed JSON, bad rating, empty text, no hotel).
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_reviews: usize,
    pub n_hotels: usize,
    pub mean_rating: f64,
    /// Population standard deviation.
    pub std_rating: f64,
    pub mean_len_chars: f64,
    pub median_len_chars: f64,
    pub class_counts: BTreeMap<u8, usize>,
}

/// Extract the hotel key from a review URL.
///
/// The last path segment is kept with any query, fragment and `.html` suffix
/// dropped. For listing URLs of the form `Hotel_Review-g1-d2-Reviews-Name-City`
/// only the part after `-Reviews-` (the hotel name segment) is used.
pub fn hotel_id_from_url(url: &str) -> Option<String> {
    let url = url.split(['?', '#']).next().unwrap_or("");
    let segment = url.trim_end_matches('/').rsplit('/').next().unwrap_or("");
    let segment = segment
        .strip_suffix(".html")
        .or_else(|| segment.strip_suffix(".htm"))
        .unwrap_or(segment);
    let name = match segment.split_once("-Reviews-") {
        Some((_, rest)) => rest,
        None => segment,
    };
    let name = name.trim();
    (!name.is_empty()).then(|| name.to_string())
}

fn parse_rating(v: &Value) -> Option<u8> {
    let x = match v {
        Value::Number(n) => n.as_f64()?,
        Value::String(s) => s.trim().parse::<f64>().ok()?,
        _ => return None,
    };
    if x.fract() != 0.0 || !(1.0..=5.0).contains(&x) {
        return None;
    }
    Some(x as u8)
}

fn parse_line(review_id: usize, line: &str) -> Option<ReviewRecord> {
    let obj: Value = serde_json::from_str(line).ok()?;
    let obj = obj.as_object()?;
    let rating = parse_rating(obj.get("rating")?)?;
    let text = obj.get("text")?.as_str()?.to_string();
    if text.trim().is_empty() {
        return None;
    }
    let hotel_id = hotel_id_from_url(obj.get("hotel_url")?.as_str()?)?;
    let title = obj
        .get("title")
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();
    Some(ReviewRecord {
        review_id,
        hotel_id,
        rating,
        title,
        text,
    })
}

/// Read the first `limit` valid reviews of a JSON-lines file (`limit == 0` reads all).
///
/// Malformed lines are skipped and counted; blank lines are ignored.
pub fn load_reviews(path: &Path, limit: usize) -> Result<LoadedCorpus> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = LoadedCorpus::default();
    for (line_no, line) in BufReader::new(file).lines().enumerate() {
        if limit > 0 && out.records.len() >= limit {
            break;
        }
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(line_no, &line) {
            Some(r) => out.records.push(r),
            None => out.skipped += 1,
        }
    }
    if out.skipped > 0 {
        log::warn!("{}: skipped {} malformed review lines", path.display(), out.skipped);
    }
    Ok(out)
}

pub fn corpus_stats(reviews: &[ReviewRecord]) -> Result<CorpusStats> {
    if reviews.is_empty() {
        return Err(Error::domain("corpus statistics need at least one review"));
    }
    let n = reviews.len() as f64;
    let mean_rating = reviews.iter().map(|r| r.rating as f64).sum::<f64>() / n;
    let var = reviews
        .iter()
        .map(|r| (r.rating as f64 - mean_rating).powi(2))
        .sum::<f64>()
        / n;

    let mut lengths: Vec<usize> = reviews.iter().map(|r| r.text.chars().count()).collect();
    lengths.sort_unstable();
    let mean_len_chars = lengths.iter().sum::<usize>() as f64 / n;
    // lower-middle element for even counts
    let median_len_chars = lengths[(lengths.len() - 1) / 2] as f64;

    let mut class_counts = BTreeMap::new();
    for r in reviews {
        *class_counts.entry(r.rating).or_insert(0) += 1;
    }
    let hotels: BTreeSet<&str> = reviews.iter().map(|r| r.hotel_id.as_str()).collect();

    Ok(CorpusStats {
        n_reviews: reviews.len(),
        n_hotels: hotels.len(),
        mean_rating,
        std_rating: var.sqrt(),
        mean_len_chars,
        median_len_chars,
        class_counts,
    })
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    fn review(rating: u8, text: &str) -> ReviewRecord {
        ReviewRecord {
            review_id: 0,
            hotel_id: "h".into(),
            rating,
            title: String::new(),
            text: text.into(),
        }
    }

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_hand_built_fixture() {
        let f = write_tmp(concat!(
            r#"{"hotel_url":"Hotel_Review-g1-d2-Reviews-Hotel_A-Rome.html","author":"x","date":"2010","rating":5,"title":"t1","text":"Great stay","property_dict":{}}"#,
            "\n",
            r#"{"hotel_url":"Hotel_Review-g1-d3-Reviews-Hotel_B-Rome.html","rating":1.0,"title":"t2","text":"Awful"}"#,
            "\n",
            r#"{"hotel_url":"Hotel_Review-g1-d2-Reviews-Hotel_A-Rome.html","rating":"4","title":"t3","text":"Fine"}"#,
            "\n"
        ));
        let c = load_reviews(f.path(), 0).unwrap();
        assert_eq!(c.skipped, 0);
        let ratings: Vec<u8> = c.records.iter().map(|r| r.rating).collect();
        assert_eq!(ratings, vec![5, 1, 4]);
        assert_eq!(c.records[1].hotel_id, "Hotel_B-Rome");
        assert_eq!(c.records[2].review_id, 2);
        assert_eq!(c.records[0].title, "t1");
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        let f = write_tmp("");
        let c = load_reviews(f.path(), 10).unwrap();
        assert!(c.records.is_empty());
        assert_eq!(c.skipped, 0);
    }

    #[test]
    fn malformed_lines_are_skipped_and_counted() {
        let f = write_tmp(concat!(
            "not json\n",
            r#"{"hotel_url":"a","rating":"five","text":"x"}"#,
            "\n",
            r#"{"hotel_url":"a","rating":6,"text":"x"}"#,
            "\n",
            r#"{"hotel_url":"a","rating":3,"text":"   "}"#,
            "\n",
            "\n",
            r#"{"hotel_url":"a","rating":3,"text":"ok"}"#,
            "\n"
        ));
        let c = load_reviews(f.path(), 0).unwrap();
        assert_eq!(c.records.len(), 1);
        assert_eq!(c.skipped, 4);
        assert_eq!(c.records[0].review_id, 5);
    }

    #[test]
    fn limit_keeps_first_records() {
        let line = r#"{"hotel_url":"a","rating":3,"text":"ok"}"#;
        let f = write_tmp(&format!("{line}\n{line}\n{line}\n"));
        assert_eq!(load_reviews(f.path(), 2).unwrap().records.len(), 2);
    }

    #[test]
    fn unreadable_file_is_io_error() {
        let err = load_reviews(Path::new("/nonexistent/reviews.jsonl"), 0).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn hotel_id_rules() {
        assert_eq!(
            hotel_id_from_url("https://www.x.com/Hotel_Review-g1-d2-Reviews-Hotel_A-Rome.html?x=1").as_deref(),
            Some("Hotel_A-Rome")
        );
        assert_eq!(hotel_id_from_url("plain_hotel").as_deref(), Some("plain_hotel"));
        assert_eq!(hotel_id_from_url(""), None);
    }

    #[test]
    fn stats_single_review() {
        let s = corpus_stats(&[review(5, "0123456789")]).unwrap();
        assert_eq!(s.mean_rating, 5.0);
        assert_eq!(s.std_rating, 0.0);
        assert_eq!(s.median_len_chars, 10.0);
        assert_eq!(s.n_hotels, 1);
    }

    #[test]
    fn stats_population_std() {
        let s = corpus_stats(&[review(1, "ab"), review(5, "abcd")]).unwrap();
        assert_eq!(s.mean_rating, 3.0);
        assert_eq!(s.std_rating, 2.0);
        // lower middle of [2, 4]
        assert_eq!(s.median_len_chars, 2.0);
        assert_eq!(s.class_counts.values().sum::<usize>(), 2);
    }

    #[test]
    fn stats_empty_is_domain_error() {
        assert!(matches!(corpus_stats(&[]), Err(Error::Domain(_))));
    }
}
