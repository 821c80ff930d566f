//! Evaluating mined pairs against an external paraphrase database and
//! against human judgments.
//!
//! Coverage answers "how many of our pairs does a general-purpose database
//! already know?" — for domain-specific corpora the interesting answer is
//! a low one. Precision counts how many of the judged pairs a human called
//! valid.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mine::ParaphrasePair;

/// Phrase normalization used for all lookups: lowercase, runs of
/// whitespace collapsed to single spaces.
fn normalize(phrase: &str) -> String {
    phrase.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Unordered key for a phrase pair.
fn key(a: &str, b: &str) -> (String, String) {
    let (a, b) = (normalize(a), normalize(b));
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn mined_keys(pairs: &[ParaphrasePair]) -> BTreeSet<(String, String)> {
    pairs
        .iter()
        .map(|p| key(&p.phrase_a, &p.phrase_b))
        .collect()
}

/// A reference database of known paraphrase pairs, unordered.
#[derive(Debug, Clone)]
pub struct ParaphraseDb {
    pairs: BTreeSet<(String, String)>,
    /// Where the pairs came from (file stem or caller-supplied name).
    pub source: String,
    /// Lines that matched neither supported format.
    pub skipped: usize,
}

impl ParaphraseDb {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        self.pairs.contains(&key(a, b))
    }
}

/// Load a paraphrase database. Each line is either the multi-field
/// `|||`-separated form (the two phrases are the second and third fields)
/// or a two-column TSV; the form is detected per line, blank lines and
/// `#` comments are ignored, and anything else is skipped and counted.
pub fn load_paraphrase_db<R: BufRead>(reader: R, source: &str) -> Result<ParaphraseDb> {
    let mut pairs = BTreeSet::new();
    let mut skipped = 0usize;
    for line in reader.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let extracted: Option<(String, String)> = if trimmed.contains(" ||| ") {
            let fields: Vec<&str> = trimmed.split(" ||| ").collect();
            (fields.len() >= 3).then(|| (normalize(fields[1]), normalize(fields[2])))
        } else {
            let fields: Vec<&str> = trimmed.split('\t').collect();
            (fields.len() == 2).then(|| (normalize(fields[0]), normalize(fields[1])))
        };
        match extracted {
            Some((a, b)) if !a.is_empty() && !b.is_empty() => {
                pairs.insert(key(&a, &b));
            }
            _ => skipped += 1,
        }
    }
    if pairs.is_empty() {
        return Err(Error::EmptyDb);
    }
    Ok(ParaphraseDb {
        pairs,
        source: source.to_string(),
        skipped,
    })
}

/// Load a database from a file; its stem becomes the source name.
pub fn load_db_file(path: &Path) -> Result<ParaphraseDb> {
    let source = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "db".to_string());
    load_paraphrase_db(BufReader::new(File::open(path)?), &source)
}

/// How much of the mined output a reference database already contains.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub db_source: String,
    /// Distinct mined pairs (by normalized unordered phrases).
    pub total: usize,
    pub covered: usize,
    /// `covered / total`; zero when nothing was mined.
    pub fraction: f64,
    pub covered_pairs: Vec<(String, String)>,
}

pub fn db_coverage(pairs: &[ParaphrasePair], db: &ParaphraseDb) -> CoverageReport {
    let keys = mined_keys(pairs);
    let covered_pairs: Vec<(String, String)> = keys
        .iter()
        .filter(|(a, b)| db.contains(a, b))
        .cloned()
        .collect();
    let total = keys.len();
    let covered = covered_pairs.len();
    let fraction = if total == 0 {
        0.0
    } else {
        covered as f64 / total as f64
    };
    CoverageReport {
        db_source: db.source.clone(),
        total,
        covered,
        fraction,
        covered_pairs,
    }
}

/// Human judgments: unordered phrase pair → valid or not.
#[derive(Debug, Clone, Default)]
pub struct LabeledPairs {
    map: BTreeMap<(String, String), bool>,
}

impl LabeledPairs {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn judgment(&self, a: &str, b: &str) -> Option<bool> {
        self.map.get(&key(a, b)).copied()
    }

    pub fn insert(&mut self, a: &str, b: &str, valid: bool) {
        self.map.insert(key(a, b), valid);
    }
}

/// Load judgments from three-column TSV: `phrase<TAB>phrase<TAB>label`,
/// where the label is  `1`/`0`, `true`/`false`, or `yes`/`no` (any case).
/// Blank lines and `#` comments are skipped; anything else is an error.
pub fn load_labels<R: BufRead>(reader: R) -> Result<LabeledPairs> {
    let mut out = LabeledPairs::default();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::InvalidFormat {
                line: lineno + 1,
                message: format!("expected phrase<TAB>phrase<TAB>label, got {trimmed:?}"),
            });
        }
        let valid = match fields[2].to_lowercase().as_str() {
            "1" | "true" | "yes" => true,
            "0" | "false" | "no" => false,
            other => {
                return Err(Error::InvalidFormat {
                    line: lineno + 1,
                    message: format!("unknown label {other:?}"),
                })
            }
        };
        out.insert(fields[0], fields[1], valid);
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

pub fn load_labels_file(path: &Path) -> Result<LabeledPairs> {
    load_labels(BufReader::new(File::open(path)?))
}

/// Precision of the mined pairs under the available judgments.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionReport {
    /// Distinct mined pairs that have a judgment.
    pub judged: usize,
    /// Judged pairs marked valid.
    pub valid: usize,
    /// Distinct mined pairs nobody judged.
    pub unjudged: usize,
    /// `valid / judged`; `None` when nothing was judged.
    pub precision: Option<f64>,
}

pub fn precision_report(pairs: &[ParaphrasePair], labels: &LabeledPairs) -> PrecisionReport {
    let keys = mined_keys(pairs);
    let mut judged = 0usize;
    let mut valid = 0usize;
    let mut unjudged = 0usize;
    for (a, b) in &keys {
        match labels.judgment(a, b) {
            Some(v) => {
                judged += 1;
                valid += usize::from(v);
            }
            None => unjudged += 1,
        }
    }
    let precision = (judged > 0).then(|| valid as f64 / judged as f64);
    PrecisionReport {
        judged,
        valid,
        unjudged,
        precision,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;
    use crate::mine::PairCategory;
    use std::io::Cursor;

    fn pair(a: &str, b: &str) -> ParaphrasePair {
        ParaphrasePair {
            phrase_a: a.to_string(),
            phrase_b: b.to_string(),
            from: NodeId(1),
            to: NodeId(2),
            support_a: BTreeSet::new(),
            support_b: BTreeSet::new(),
            category: PairCategory::Verb,
        }
    }

    #[test]
    fn multi_field_lines_use_second_and_third_fields() {
        let text = "[VP] ||| shrugged off ||| gotten rid of ||| features ||| more\n";
        let db = load_paraphrase_db(Cursor::new(text), "db").unwrap();
        assert_eq!(db.len(), 1);
        assert!(db.contains("gotten rid of", "shrugged off"));
        assert!(db.contains("Shrugged  Off", "gotten rid of"));
        assert!(!db.contains("shrugged off", "fully recovered"));
    }

    #[test]
    fn two_column_lines_and_comments_work() {
        let text = "# comment\nsend\tshare\n\nbook\treserve\n";
        let db = load_paraphrase_db(Cursor::new(text), "db").unwrap();
        assert_eq!(db.len(), 2);
        assert_eq!(db.skipped, 0);
        assert!(db.contains("share", "send"));
    }

    #[test]
    fn formats_may_mix_and_bad_lines_are_counted() {
        let text = "send\tshare\nx ||| too few\njust-one-column\na ||| b ||| c\n";
        let db = load_paraphrase_db(Cursor::new(text), "db").unwrap();
        assert_eq!(db.len(), 2);
        assert_eq!(db.skipped, 2);
    }

    #[test]
    fn databases_with_no_usable_pairs_are_an_error() {
        assert!(matches!(
            load_paraphrase_db(Cursor::new("#only\n"), "db"),
            Err(Error::EmptyDb)
        ));
        assert!(matches!(
            load_paraphrase_db(Cursor::new("bad line\n"), "db"),
            Err(Error::EmptyDb)
        ));
    }

    #[test]
    fn coverage_counts_distinct_pairs() {
        let db =
            load_paraphrase_db(Cursor::new("send\tshare\nbook\treserve\n"), "small").unwrap();
        let mined = vec![
            pair("send", "share"),
            pair("share", "send"), // same pair, opposite order
            pair("grab", "take"),
        ];
        let report = db_coverage(&mined, &db);
        assert_eq!(report.total, 2);
        assert_eq!(report.covered, 1);
        assert!((report.fraction - 0.5).abs() < 1e-12);
        assert_eq!(report.db_source, "small");
        assert_eq!(
            report.covered_pairs,
            vec![("send".to_string(), "share".to_string())]
        );
    }

    #[test]
    fn coverage_extremes() {
        let db = load_paraphrase_db(Cursor::new("a\tb\n"), "db").unwrap();
        let all = vec![pair("a", "b")];
        assert_eq!(db_coverage(&all, &db).fraction, 1.0);
        let none = vec![pair("x", "y")];
        assert_eq!(db_coverage(&none, &db).fraction, 0.0);
        let empty: Vec<ParaphrasePair> = Vec::new();
        let report = db_coverage(&empty, &db);
        assert_eq!(report.total, 0);
        assert_eq!(report.fraction, 0.0);
    }

    #[test]
    fn labels_parse_and_reject_garbage() {
        let labels =
            load_labels(Cursor::new("send\tshare\t1\ngrab\ttake\tno\n")).unwrap();
        assert_eq!(labels.len(), 2);
        assert_eq!(labels.judgment("share", "send"), Some(true));
        assert_eq!(labels.judgment("take", "grab"), Some(false));
        assert_eq!(labels.judgment("a", "b"), None);

        assert!(matches!(
            load_labels(Cursor::new("a\tb\tmaybe\n")),
            Err(Error::InvalidFormat { line: 1, .. })
        ));
        assert!(matches!(
            load_labels(Cursor::new("a\tb\n")),
            Err(Error::InvalidFormat { line: 1, .. })
        ));
        assert!(matches!(
            load_labels(Cursor::new("")),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn precision_reports_valid_over_judged() {
        let mut labels = LabeledPairs::default();
        labels.insert("send", "share", true);
        labels.insert("grab", "take", false);
        let mined = vec![pair("send", "share"), pair("grab", "take"), pair("x", "y")];
        let report = precision_report(&mined, &labels);
        assert_eq!(report.judged, 2);
        assert_eq!(report.valid, 1);
        assert_eq!(report.unjudged, 1);
        assert!((report.precision.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn precision_without_judgments_is_none() {
        let labels = LabeledPairs::default();
        let mined = vec![pair("a", "b")];
        let report = precision_report(&mined, &labels);
        assert_eq!(report.judged, 0);
        assert_eq!(report.precision, None);
        assert_eq!(report.unjudged, 1);
    }
}
