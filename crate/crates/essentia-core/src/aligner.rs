//! Greedy weighted word alignment between sentence pairs.
//!
//! Every token pair is scored as a weighted blend of exact match, embedding
//! cosine, and context overlap. Pairs scoring at or above the threshold are
//! accepted greedily, best first, under a one-to-one constraint and (by
//! default) a strict left-to-right ordering constraint.
//!
//! Ties are broken deterministically: higher score first, then the pair
//! whose relative positions in the two sentences are closest, then the
//! smaller indices. The whole stage is deterministic given its inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::corpus::{MaskTag, Sentence, SentenceId};
use crate::error::{Error, Result};
use crate::{Scalar, Score};

/// Weights and knobs for token scoring and greedy pair selection.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignerConfig<S = Score> {
    /// Weight of the exact-match component.
    pub w_exact: S,
    /// Weight of the embedding-cosine component.
    pub w_embedding: S,
    /// Weight of the context-overlap component.
    pub w_context: S,
    /// Minimum blended score for a pair to be considered at all.
    pub threshold: S,
    /// Tokens on each side of a position that form its context window.
    pub context_window: usize,
    /// Require accepted pairs to be strictly increasing on both sides.
    pub enforce_monotone: bool,
}

impl<S: Scalar> Default for AlignerConfig<S> {
    fn default() -> Self {
        AlignerConfig {
            w_exact: S::from_f64_lossy(0.55),
            w_embedding: S::from_f64_lossy(0.30),
            w_context: S::from_f64_lossy(0.15),
            threshold: S::from_f64_lossy(0.60),
            context_window: 2,
            enforce_monotone: true,
        }
    }
}

impl<S: Scalar> AlignerConfig<S> {
    /// Check the weights form a convex combination and the threshold is a
    /// proportion. Entry points call this once before aligning.
    pub fn validate(&self) -> Result<()> {
        let weights = [self.w_exact, self.w_embedding, self.w_context];
        if weights.iter().any(|w| *w < S::zero()) {
            return Err(Error::InvalidConfig(
                "alignment weights must be non-negative".to_string(),
            ));
        }
        let sum: f64 = weights.iter().filter_map(|w| w.to_f64()).sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidConfig(format!(
                "alignment weights must sum to 1, got {sum}"
            )));
        }
        let t = self.threshold.to_f64().unwrap_or(f64::NAN);
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidConfig(format!(
                "alignment threshold must lie in [0, 1], got {t}"
            )));
        }
        if self.context_window == 0 {
            return Err(Error::InvalidConfig(
                "context window must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// Optional lookup resources shared across all pair alignments.
#[derive(Debug, Clone, Copy, Default)]
pub struct AlignResources<'a, S = Score> {
    pub embeddings: Option<&'a EmbeddingTable<S>>,
    pub synonyms: Option<&'a SynonymLexicon>,
}

/// Word vectors keyed by surface-normal form, all of one dimension.
#[derive(Debug, Clone)]
pub struct EmbeddingTable<S = Score> {
    dim: usize,
    vectors: BTreeMap<String, Vec<S>>,
}

impl<S: Scalar> EmbeddingTable<S> {
    /// Parse whitespace-separated `word v1 .. vd` lines. The first line
    /// fixes the dimension; later lines must agree.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<EmbeddingTable<S>> {
        let mut dim = 0usize;
        let mut vectors = BTreeMap::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let word = fields.next().expect("non-empty line has a first field");
            let values: Vec<S> = fields
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .and_then(S::from_f64)
                        .ok_or_else(|| Error::InvalidFormat {
                            line: lineno + 1,
                            message: format!("bad vector component {f:?}"),
                        })
                })
                .collect::<Result<_>>()?;
            if values.is_empty() {
                return Err(Error::InvalidFormat {
                    line: lineno + 1,
                    message: format!("no vector components after {word:?}"),
                });
            }
            if dim == 0 {
                dim = values.len();
            } else if values.len() != dim {
                return Err(Error::InvalidFormat {
                    line: lineno + 1,
                    message: format!("expected {dim} components, got {}", values.len()),
                });
            }
            vectors.insert(word.to_string(), values);
        }
        if vectors.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(EmbeddingTable { dim, vectors })
    }

    pub fn load(path: &Path) -> Result<EmbeddingTable<S>> {
        Self::from_reader(BufReader::new(File::open(path)?))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[S]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// Cosine similarity of two stored vectors. `None` when either word is
    /// missing or has a zero-length vector.
    pub fn similarity(&self, a: &str, b: &str) -> Option<S> {
        let (va, vb) = (self.get(a)?, self.get(b)?);
        let mut dot = S::zero();
        let mut na = S::zero();
        let mut nb = S::zero();
        for (x, y) in va.iter().zip(vb.iter()) {
            dot = dot + *x * *y;
            na = na + *x * *x;
            nb = nb + *y * *y;
        }
        if na.is_zero() || nb.is_zero() {
            return None;
        }
        Some(dot / (na.sqrt() * nb.sqrt()))
    }
}

/// Unordered synonym pairs; a pair counts as an exact match when scoring.
#[derive(Debug, Clone, Default)]
pub struct SynonymLexicon {
    pairs: BTreeSet<(String, String)>,
}

impl SynonymLexicon {
    /// Parse two-column tab-separated lines; `#` comments and blank lines
    /// are skipped. Pairs are stored unordered and lowercased.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<SynonymLexicon> {
        let mut pairs = BTreeSet::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 2 || fields.iter().any(|f| f.trim().is_empty()) {
                return Err(Error::InvalidFormat {
                    line: lineno + 1,
                    message: format!("expected word<TAB>word, got {trimmed:?}"),
                });
            }
            pairs.insert(Self::key(fields[0].trim(), fields[1].trim()));
        }
        if pairs.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(SynonymLexicon { pairs })
    }

    pub fn load(path: &Path) -> Result<SynonymLexicon> {
        Self::from_reader(BufReader::new(File::open(path)?))
    }

    fn key(a: &str, b: &str) -> (String, String) {
        let (a, b) = (a.to_lowercase(), b.to_lowercase());
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        self.pairs.contains(&Self::key(a, b))
    }
}

/// The accepted token pairing between two sentences.
///
/// `pairs` holds `(i, j)` position pairs sorted by `i`; `scores` carries the
/// blended score of each pair in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment<S = Score> {
    pub s1: SentenceId,
    pub s2: SentenceId,
    pub pairs: Vec<(usize, usize)>,
    pub scores: Vec<S>,
}

impl<S> Alignment<S> {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Normals in the ±window context of position `i`, excluding `i` itself.
fn context_set(s: &Sentence, i: usize, window: usize) -> BTreeSet<&str> {
    let lo = i.saturating_sub(window);
    let hi = (i + window).min(s.tokens.len().saturating_sub(1));
    (lo..=hi)
        .filter(|&p| p != i)
        .map(|p| s.tokens[p].normal.as_str())
        .collect()
}

fn jaccard<S: Scalar>(a: &BTreeSet<&str>, b: &BTreeSet<&str>) -> S {
    if a.is_empty() && b.is_empty() {
        return S::one();
    }
    if a.is_empty() || b.is_empty() {
        return S::zero();
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    S::from_usize(inter).expect("set size fits scalar")
        / S::from_usize(union).expect("set size fits scalar")
}

/// Blended similarity of token `i` of `s1` with token `j` of `s2`.
///
/// Components: exact match of normal forms (synonym pairs count), embedding
/// cosine clamped to `[0, 1]` (falls back to the exact component when either
/// vector is unavailable), and Jaccard overlap of the two context windows.
/// Two tokens masked with *different* symbols never match: a number is not
/// an entity.
pub fn token_similarity<S: Scalar>(
    s1: &Sentence,
    i: usize,
    s2: &Sentence,
    j: usize,
    cfg: &AlignerConfig<S>,
    res: &AlignResources<'_, S>,
) -> S {
    let t1 = &s1.tokens[i];
    let t2 = &s2.tokens[j];
    if t1.mask != MaskTag::None && t2.mask != MaskTag::None && t1.mask != t2.mask {
        return S::zero();
    }
    let exact_match = t1.normal == t2.normal
        || res
            .synonyms
            .map(|syn| syn.are_synonyms(&t1.normal, &t2.normal))
            .unwrap_or(false);
    let exact = if exact_match { S::one() } else { S::zero() };
    let emb = res
        .embeddings
        .and_then(|table| table.similarity(&t1.normal, &t2.normal))
        .map(|cos| cos.max(S::zero()).min(S::one()))
        .unwrap_or(exact);
    let ctx = jaccard::<S>(
        &context_set(s1, i, cfg.context_window),
        &context_set(s2, j, cfg.context_window),
    );
    cfg.w_exact * exact + cfg.w_embedding * emb + cfg.w_context * ctx
}

/// Align one sentence pair greedily.
///
/// All positions pairs scoring at least `cfg.threshold` are sorted by
/// descending score, then ascending relative-position distance
/// `|i/len1 - j/len2|` (compared exactly as `|i*len2 - j*len1|`), then
/// ascending `i`, then `j`, and accepted in order subject to one-to-one use
/// of every position and, when `enforce_monotone` is set, strict ordering:
/// a new pair must not cross any accepted pair.
pub fn align_pair<S: Scalar>(
    s1: &Sentence,
    s2: &Sentence,
    cfg: &AlignerConfig<S>,
    res: &AlignResources<'_, S>,
) -> Alignment<S> {
    let (len1, len2) = (s1.tokens.len(), s2.tokens.len());
    let mut candidates: Vec<(usize, usize, S, i64)> = Vec::new();
    for i in 0..len1 {
        for j in 0..len2 {
            let score = token_similarity(s1, i, s2, j, cfg, res);
            if score >= cfg.threshold {
                let delta = ((i as i64) * (len2 as i64) - (j as i64) * (len1 as i64)).abs();
                candidates.push((i, j, score, delta));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .expect("similarity scores are finite")
            .then(a.3.cmp(&b.3))
            .then(a.0.cmp(&b.0))
            .then(a.1.cmp(&b.1))
    });

    let mut used1 = vec![false; len1];
    let mut used2 = vec![false; len2];
    let mut accepted: Vec<(usize, usize, S)> = Vec::new();
    for (i, j, score, _) in candidates {
        if used1[i] || used2[j] {
            continue;
        }
        if cfg.enforce_monotone
            && accepted
                .iter()
                .any(|&(pi, pj, _)| (i < pi) != (j < pj))
        {
            continue;
        }
        used1[i] = true;
        used2[j] = true;
        accepted.push((i, j, score));
    }
    accepted.sort_by_key(|&(i, j, _)| (i, j));
    Alignment {
        s1: s1.id,
        s2: s2.id,
        pairs: accepted.iter().map(|&(i, j, _)| (i, j)).collect(),
        scores: accepted.into_iter().map(|(_, _, s)| s).collect(),
    }
}

/// Align every unordered sentence pair of the document, in `(i, j)` id
/// order with `i < j`. Validates the configuration once up front.
pub fn align_all_pairs<S: Scalar>(
    doc: &crate::corpus::Document,
    cfg: &AlignerConfig<S>,
    res: &AlignResources<'_, S>,
) -> Result<Vec<Alignment<S>>> {
    cfg.validate()?;
    let n = doc.sentences.len();
    let mut out = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(align_pair(&doc.sentences[i], &doc.sentences[j], cfg, res));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{mask_special, tokenize, MaskConfig};
    use std::io::Cursor;

    fn sent(raw: &str, id: usize) -> Sentence {
        let mut s = mask_special(&tokenize(raw).unwrap(), &MaskConfig::default());
        s.id = SentenceId(id);
        s
    }

    fn cfg() -> AlignerConfig {
        AlignerConfig::default()
    }

    #[test]
    fn default_config_is_valid() {
        assert!(cfg().validate().is_ok());
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut c = cfg();
        c.w_exact = -0.1;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        let mut c = cfg();
        c.w_context = 0.5;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        let mut c = cfg();
        c.threshold = 1.5;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        let mut c = cfg();
        c.context_window = 0;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn identical_tokens_in_identical_context_score_one() {
        let s = sent("the world economy has fully recovered from the crisis.", 0);
        let score = token_similarity(&s, 0, &s, 0, &cfg(), &AlignResources::default());
        assert!((score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn same_word_different_context_scores_exact_weight_only() {
        let s1 = sent("The world economy has fully recovered from the crisis.", 0);
        let s2 = sent("The world economy has shrugged off the crisis completely.", 1);
        // "the" opening s1 vs the second "the" of s2: contexts are disjoint
        let score = token_similarity(&s1, 0, &s2, 6, &cfg(), &AlignResources::default());
        assert!((score - 0.85).abs() < 1e-12, "got {score}");
    }

    #[test]
    fn different_words_score_below_threshold_without_embeddings() {
        let s1 = sent("fully recovered", 0);
        let s2 = sent("shrugged off", 1);
        for i in 0..2 {
            for j in 0..2 {
                let score = token_similarity(&s1, i, &s2, j, &cfg(), &AlignResources::default());
                assert!(score < 0.60, "({i},{j}) scored {score}");
            }
        }
    }

    #[test]
    fn cross_mask_pairs_score_zero() {
        let s1 = sent("pay 5 now", 0);
        let s2 = sent("pay Acme now", 1);
        assert_eq!(s1.tokens[1].mask, MaskTag::Num);
        assert_eq!(s2.tokens[1].mask, MaskTag::Org);
        let score = token_similarity(&s1, 1, &s2, 1, &cfg(), &AlignResources::default());
        assert_eq!(score, 0.0);
    }

    #[test]
    fn masked_numbers_align_with_each_other() {
        let s1 = sent("book 5 rooms", 0);
        let s2 = sent("book two rooms", 1);
        let a = align_pair(&s1, &s2, &cfg(), &AlignResources::default());
        assert!(a.pairs.contains(&(1, 1)), "pairs: {:?}", a.pairs);
    }

    #[test]
    fn align_recovered_vs_shrugged_sentences() {
        let s1 = sent("The world economy has fully recovered from the crisis.", 0);
        let s2 = sent("The world economy has shrugged off the crisis completely.", 1);
        let a = align_pair(&s1, &s2, &cfg(), &AlignResources::default());
        assert_eq!(
            a.pairs,
            vec![(0, 0), (1, 1), (2, 2), (3, 3), (7, 6), (8, 7), (9, 9)]
        );
    }

    #[test]
    fn align_recovered_vs_gotten_rid_sentences() {
        let s1 = sent("The world economy has fully recovered from the crisis.", 0);
        let s3 = sent("The world economy has gotten rid of the crisis already.", 2);
        let a = align_pair(&s1, &s3, &cfg(), &AlignResources::default());
        assert_eq!(
            a.pairs,
            vec![(0, 0), (1, 1), (2, 2), (3, 3), (7, 7), (8, 8), (9, 10)]
        );
    }

    #[test]
    fn align_shrugged_vs_gotten_rid_sentences() {
        let s2 = sent("The world economy has shrugged off the crisis completely.", 1);
        let s3 = sent("The world economy has gotten rid of the crisis already.", 2);
        let a = align_pair(&s2, &s3, &cfg(), &AlignResources::default());
        assert_eq!(
            a.pairs,
            vec![(0, 0), (1, 1), (2, 2), (3, 3), (6, 7), (7, 8), (9, 10)]
        );
    }

    #[test]
    fn self_alignment_is_identity() {
        let s = sent("The world economy has gotten rid of the crisis already.", 0);
        let a = align_pair(&s, &s, &cfg(), &AlignResources::default());
        let identity: Vec<(usize, usize)> = (0..s.tokens.len()).map(|i| (i, i)).collect();
        assert_eq!(a.pairs, identity);
        assert!(a.scores.iter().all(|&s| (s - 1.0).abs() < 1e-12));
    }

    #[test]
    fn monotone_constraint_drops_crossing_pair() {
        let s1 = sent("yesterday i saw him", 0);
        let s2 = sent("i saw him yesterday", 1);

        let mut free = cfg();
        free.enforce_monotone = false;
        let a = align_pair(&s1, &s2, &free, &AlignResources::default());
        assert_eq!(a.pairs, vec![(0, 3), (1, 0), (2, 1), (3, 2)]);

        let a = align_pair(&s1, &s2, &cfg(), &AlignResources::default());
        assert_eq!(a.pairs, vec![(1, 0), (2, 1), (3, 2)]);
    }

    #[test]
    fn synonyms_count_as_exact_match() {
        let syn = SynonymLexicon::from_reader(Cursor::new("hi\thello\n")).unwrap();
        let s1 = sent("hi", 0);
        let s2 = sent("hello", 1);
        let res = AlignResources {
            synonyms: Some(&syn),
            ..Default::default()
        };
        let a = align_pair(&s1, &s2, &cfg(), &res);
        assert_eq!(a.pairs, vec![(0, 0)]);
        let bare = align_pair(&s1, &s2, &cfg(), &AlignResources::default());
        assert!(bare.pairs.is_empty());
    }

    #[test]
    fn embedding_cosine_values() {
        let table: EmbeddingTable =
            EmbeddingTable::from_reader(Cursor::new("cat 1 0\nfeline 1 0\ndog 0 1\n")).unwrap();
        assert_eq!(table.dim(), 2);
        assert_eq!(table.similarity("cat", "feline"), Some(1.0));
        assert_eq!(table.similarity("cat", "dog"), Some(0.0));
        assert_eq!(table.similarity("cat", "missing"), None);
    }

    #[test]
    fn embeddings_raise_related_word_scores() {
        let table: EmbeddingTable =
            EmbeddingTable::from_reader(Cursor::new("send 1 0\nshare 0.9 0.1\n")).unwrap();
        let s1 = sent("send it", 0);
        let s2 = sent("share it", 1);
        let res = AlignResources {
            embeddings: Some(&table),
            ..Default::default()
        };
        let with = token_similarity(&s1, 0, &s2, 0, &cfg(), &res);
        let without = token_similarity(&s1, 0, &s2, 0, &cfg(), &AlignResources::default());
        assert!(with > without, "{with} vs {without}");
    }

    #[test]
    fn embedding_loader_rejects_bad_lines() {
        let r: Result<EmbeddingTable> = EmbeddingTable::from_reader(Cursor::new("cat 1 x\n"));
        assert!(matches!(r, Err(Error::InvalidFormat { line: 1, .. })));
        let r: Result<EmbeddingTable> =
            EmbeddingTable::from_reader(Cursor::new("cat 1 0\ndog 1\n"));
        assert!(matches!(r, Err(Error::InvalidFormat { line: 2, .. })));
        let r: Result<EmbeddingTable> = EmbeddingTable::from_reader(Cursor::new(""));
        assert!(matches!(r, Err(Error::EmptyInput)));
    }

    #[test]
    fn synonym_loader_rejects_bad_lines() {
        let r = SynonymLexicon::from_reader(Cursor::new("only-one-column\n"));
        assert!(matches!(r, Err(Error::InvalidFormat { line: 1, .. })));
    }

    #[test]
    fn synonyms_are_unordered_and_case_insensitive() {
        let syn = SynonymLexicon::from_reader(Cursor::new("Hi\thello\n")).unwrap();
        assert!(syn.are_synonyms("hello", "hi"));
        assert!(syn.are_synonyms("HI", "Hello"));
        assert!(!syn.are_synonyms("hello", "hey"));
    }

    #[test]
    fn all_pairs_count_is_quadratic() {
        let text = "a b c\nb c d\nc d e\nd e f\n";
        let doc =
            crate::corpus::load_corpus(Cursor::new(text), "t", &MaskConfig::default()).unwrap();
        let alignments = align_all_pairs(&doc, &cfg(), &AlignResources::default()).unwrap();
        assert_eq!(alignments.len(), 4 * 3 / 2);
        assert_eq!(alignments[0].s1, SentenceId(0));
        assert_eq!(alignments[0].s2, SentenceId(1));
        assert_eq!(alignments[5].s1, SentenceId(2));
        assert_eq!(alignments[5].s2, SentenceId(3));
    }

    #[test]
    fn raising_threshold_keeps_a_subset() {
        let s1 = sent("The world economy has fully recovered from the crisis.", 0);
        let s2 = sent("The world economy has shrugged off the crisis completely.", 1);
        let base = align_pair(&s1, &s2, &cfg(), &AlignResources::default());
        let mut strict = cfg();
        strict.threshold = 0.9;
        let high = align_pair(&s1, &s2, &strict, &AlignResources::default());
        assert!(high.pairs.iter().all(|p| base.pairs.contains(p)));
        assert!(high.pairs.len() < base.pairs.len());
    }

    #[test]
    fn f32_scalar_matches_f64_decisions() {
        let s1 = sent("The world economy has fully recovered from the crisis.", 0);
        let s2 = sent("The world economy has shrugged off the crisis completely.", 1);
        let c32: AlignerConfig<f32> = AlignerConfig::default();
        let a32 = align_pair(&s1, &s2, &c32, &AlignResources::<f32>::default());
        let a64 = align_pair(&s1, &s2, &cfg(), &AlignResources::default());
        assert_eq!(a32.pairs, a64.pairs);
    }
}
