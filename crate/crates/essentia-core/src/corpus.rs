//! Corpus ingestion: tokenization and number/entity masking.
//!
//! Input is a cluster of same-intent sentences, one per line. Each sentence
//! is split into tokens, lowercased into a normal form, and numbers and
//! likely named entities are replaced by the mask symbols `NUM` and `ORG`
//! so that different literals align with each other downstream.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon;

/// Characters split off a token's edges during tokenization.
const EDGE_PUNCT: &[char] = &['.', ',', '?', '!', ';', ':', '\'', '"', '(', ')'];

/// Mask symbol substituted for numeric tokens.
pub const NUM_SYMBOL: &str = "NUM";
/// Mask symbol substituted for entity tokens.
pub const ORG_SYMBOL: &str = "ORG";

/// Identifies a sentence within its document (assigned as load order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SentenceId(pub usize);

impl fmt::Display for SentenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MaskTag {
    None,
    Num,
    Org,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PosTag {
    Verb,
    Noun,
    Adp,
    Det,
    Other,
    Unknown,
}

impl PosTag {
    fn parse(s: &str) -> Option<PosTag> {
        match s {
            "VERB" => Some(PosTag::Verb),
            "NOUN" => Some(PosTag::Noun),
            "ADP" => Some(PosTag::Adp),
            "DET" => Some(PosTag::Det),
            "OTHER" => Some(PosTag::Other),
            "UNKNOWN" | "" => Some(PosTag::Unknown),
            _ => None,
        }
    }
}

/// One token of a sentence.
///
/// `normal` is the lowercased surface, or the mask symbol once masked; the
/// surface is always preserved so masking can be re-derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub normal: String,
    pub mask: MaskTag,
    pub pos: PosTag,
    /// Index of this token within its owning sentence.
    pub position: usize,
}

impl Token {
    fn new(surface: &str, position: usize) -> Token {
        Token {
            surface: surface.to_string(),
            normal: surface.to_lowercase(),
            mask: MaskTag::None,
            pos: PosTag::Unknown,
            position,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: SentenceId,
    pub tokens: Vec<Token>,
    pub raw: String,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Normal forms in sentence order.
    pub fn normals(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.normal.clone()).collect()
    }
}

/// One intent cluster: the unit the whole pipeline operates on.
#[derive(Debug, Clone)]
pub struct Document {
    pub sentences: Vec<Sentence>,
    pub label: String,
}

impl Document {
    pub fn sentence(&self, id: SentenceId) -> Option<&Sentence> {
        self.sentences.iter().find(|s| s.id == id)
    }
}

/// Entity gazetteer: surface-form phrases masked as ORG wherever they occur.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    /// Lowercased token sequences, longest first.
    entries: Vec<Vec<String>>,
}

impl Gazetteer {
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Gazetteer> {
        let mut entries = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let toks: Vec<String> = trimmed
                .split_whitespace()
                .map(|t| t.to_lowercase())
                .collect();
            if !toks.is_empty() {
                entries.push(toks);
            }
        }
        // longest-match-first scan order
        entries.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        entries.dedup();
        Ok(Gazetteer { entries })
    }

    pub fn load(path: &Path) -> Result<Gazetteer> {
        Self::from_reader(BufReader::new(File::open(path)?))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Length of the entry matching at `start`, if any.
    fn match_at(&self, normals: &[String], start: usize) -> Option<usize> {
        self.entries.iter().find_map(|entry| {
            let end = start + entry.len();
            if end <= normals.len() && normals[start..end] == entry[..] {
                Some(entry.len())
            } else {
                None
            }
        })
    }
}

/// Masking rules applied after tokenization.
#[derive(Debug, Clone, Default)]
pub struct MaskConfig {
    pub gazetteer: Gazetteer,
}

/// Split `raw` into tokens: whitespace first, then leading/trailing
/// punctuation peeled off into tokens of their own. Internal punctuation
/// (apostrophes, hyphens) stays put.
pub fn tokenize(raw: &str) -> Result<Sentence> {
    let mut tokens: Vec<Token> = Vec::new();
    for chunk in raw.split_whitespace() {
        let mut leading: Vec<&str> = Vec::new();
        let mut trailing: Vec<&str> = Vec::new();
        let mut core = chunk;
        while let Some(c) = core.chars().next() {
            if EDGE_PUNCT.contains(&c) {
                let (head, rest) = core.split_at(c.len_utf8());
                leading.push(head);
                core = rest;
            } else {
                break;
            }
        }
        while let Some(c) = core.chars().next_back() {
            if EDGE_PUNCT.contains(&c) {
                let (rest, tail) = core.split_at(core.len() - c.len_utf8());
                trailing.push(tail);
                core = rest;
            } else {
                break;
            }
        }
        trailing.reverse();
        for piece in leading
            .into_iter()
            .chain((!core.is_empty()).then_some(core))
            .chain(trailing)
        {
            let position = tokens.len();
            tokens.push(Token::new(piece, position));
        }
    }
    if tokens.is_empty() {
        return Err(Error::EmptySentence);
    }
    Ok(Sentence {
        id: SentenceId(0),
        tokens,
        raw: raw.to_string(),
    })
}

fn is_digit_string(surface: &str) -> bool {
    let mut digits = 0;
    for c in surface.chars() {
        if c.is_ascii_digit() {
            digits += 1;
        } else if !matches!(c, '.' | ',' | '-' | '/' | '%') {
            return false;
        }
    }
    digits > 0
}

/// Ordinal digit forms: 1st, 2nd, 3rd, 11th, 22nd, ...
fn is_digit_ordinal(lower: &str) -> bool {
    let suffix = &["st", "nd", "rd", "th"];
    suffix.iter().any(|suf| {
        lower
            .strip_suffix(suf)
            .map(|stem| !stem.is_empty() && stem.chars().all(|c| c.is_ascii_digit()))
            .unwrap_or(false)
    })
}

fn is_number_token(surface: &str) -> bool {
    let lower = surface.to_lowercase();
    if is_digit_string(surface) || is_digit_ordinal(&lower) {
        return true;
    }
    // number words, possibly hyphenated ("twenty-two")
    lower
        .split('-')
        .all(|part| !part.is_empty() && lexicon::is_number_word(part))
        && !lower.is_empty()
}

/// Apply NUM/ORG masking. Token count and positions are preserved; only
/// `normal` and `mask` change. Masking is idempotent because it keys off
/// the (unchanged) surface forms.
pub fn mask_special(s: &Sentence, rules: &MaskConfig) -> Sentence {
    let mut out = s.clone();
    // reset so repeated application cannot compound
    for tok in &mut out.tokens {
        tok.mask = MaskTag::None;
        tok.normal = tok.surface.to_lowercase();
    }

    let normals: Vec<String> = out.tokens.iter().map(|t| t.normal.clone()).collect();
    let mut entity = vec![false; out.tokens.len()];

    // gazetteer phrases, longest match first
    let mut i = 0;
    while i < normals.len() {
        if let Some(len) = rules.gazetteer.match_at(&normals, i) {
            for flag in entity.iter_mut().skip(i).take(len) {
                *flag = true;
            }
            i += len;
        } else {
            i += 1;
        }
    }

    for (idx, tok) in out.tokens.iter_mut().enumerate() {
        if is_number_token(&tok.surface) {
            tok.mask = MaskTag::Num;
            tok.normal = NUM_SYMBOL.to_string();
            continue;
        }
        // capitalization heuristic never fires on the sentence-initial token
        let capitalized = idx > 0
            && tok
                .surface
                .chars()
                .next()
                .map(|c| c.is_uppercase())
                .unwrap_or(false);
        if entity[idx] || capitalized {
            tok.mask = MaskTag::Org;
            tok.normal = ORG_SYMBOL.to_string();
        }
    }
    out
}

/// Load a plain-text corpus: one sentence per line, `#` comments and blank
/// lines skipped. Sentences are tokenized and masked; ids are assigned in
/// load order.
pub fn load_corpus<R: BufRead>(source: R, label: &str, rules: &MaskConfig) -> Result<Document> {
    let mut sentences = Vec::new();
    for line in source.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut sentence = tokenize(trimmed)?;
        sentence = mask_special(&sentence, rules);
        sentence.id = SentenceId(sentences.len());
        sentences.push(sentence);
    }
    if sentences.is_empty() {
        return Err(Error::EmptyDocument);
    }
    Ok(Document {
        sentences,
        label: label.to_string(),
    })
}

/// Load a pre-tagged corpus: one `surface<TAB>pos<TAB>mask` line per token,
/// blank line between sentences. Supplied tags override the built-in
/// masking rules entirely.
pub fn load_tagged<R: BufRead>(source: R, label: &str) -> Result<Document> {
    let mut sentences: Vec<Sentence> = Vec::new();
    let mut tokens: Vec<Token> = Vec::new();
    let flush = |tokens: &mut Vec<Token>, sentences: &mut Vec<Sentence>| {
        if tokens.is_empty() {
            return;
        }
        let raw = tokens
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        sentences.push(Sentence {
            id: SentenceId(sentences.len()),
            tokens: std::mem::take(tokens),
            raw,
        });
    };

    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            flush(&mut tokens, &mut sentences);
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::InvalidFormat {
                line: lineno + 1,
                message: format!("expected surface<TAB>pos<TAB>mask, got {:?}", trimmed),
            });
        }
        let surface = fields[0];
        if surface.is_empty() {
            return Err(Error::InvalidFormat {
                line: lineno + 1,
                message: "empty surface form".to_string(),
            });
        }
        let pos = PosTag::parse(fields[1]).ok_or_else(|| Error::InvalidFormat {
            line: lineno + 1,
            message: format!("unknown pos tag {:?}", fields[1]),
        })?;
        let (mask, normal) = match fields[2] {
            "NONE" | "" => (MaskTag::None, surface.to_lowercase()),
            "NUM" => (MaskTag::Num, NUM_SYMBOL.to_string()),
            "ORG" => (MaskTag::Org, ORG_SYMBOL.to_string()),
            other => {
                return Err(Error::InvalidFormat {
                    line: lineno + 1,
                    message: format!("unknown mask tag {:?}", other),
                })
            }
        };
        tokens.push(Token {
            surface: surface.to_string(),
            normal,
            mask,
            pos,
            position: tokens.len(),
        });
    }
    flush(&mut tokens, &mut sentences);
    if sentences.is_empty() {
        return Err(Error::EmptyDocument);
    }
    Ok(Document {
        sentences,
        label: label.to_string(),
    })
}

/// Load a corpus from a path, dispatching on the `.tagged` extension.
/// The document label defaults to the file stem.
pub fn load_document(path: &Path, rules: &MaskConfig) -> Result<Document> {
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string());
    let reader = BufReader::new(File::open(path)?);
    if path.extension().map(|e| e == "tagged").unwrap_or(false) {
        load_tagged(reader, &label)
    } else {
        load_corpus(reader, &label, rules)
    }
}

/// True when every character of the label is edge punctuation.
pub fn is_punct_label(label: &str) -> bool {
    !label.is_empty() && label.chars().all(|c| EDGE_PUNCT.contains(&c))
}

/// The set of distinct normals of a document (diagnostics).
pub fn vocabulary(doc: &Document) -> HashSet<&str> {
    doc.sentences
        .iter()
        .flat_map(|s| s.tokens.iter().map(|t| t.normal.as_str()))
        .collect()
}
