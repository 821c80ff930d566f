//! Compatibility of pairwise alignments, and partitioning sentences into
//! groups whose alignments can be contracted into one DAG.
//!
//! Three conditions make a set of alignments well-behaved:
//!
//! - **injectivity** — within one alignment, no position is used twice;
//! - **monotonicity** — within one alignment, accepted pairs never cross;
//! - **transitivity** — alignment chains must not contradict each other:
//!   if word a aligns to b and b to c, then an alignment between a's and
//!   c's sentences must not pair a or c with anything else.
//!
//! The conditions are necessary but not sufficient for acyclic contraction:
//! union chains across four or more sentences can still merge two tokens of
//! one sentence (or otherwise close a directed cycle) without any pairwise
//! contradiction. Partitioning therefore also probes the actual contraction
//! of each candidate group and rejects joins that fail, so the graphs built
//! from the returned groups always succeed. Set
//! [`PartitionConfig::require_acyclic`] to `false` to get the conditions
//! exactly as stated, cycles and all.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::aligner::Alignment;
use crate::corpus::{Document, SentenceId};
use crate::dsu::UnionFind;
use crate::graph::contract_from_state;
use crate::{Scalar, Score};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    Injectivity,
    Monotonicity,
    Transitivity,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ViolationKind::Injectivity => "injectivity",
            ViolationKind::Monotonicity => "monotonicity",
            ViolationKind::Transitivity => "transitivity",
        };
        f.write_str(name)
    }
}

/// One broken condition, with the word positions that witness it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Sorted, deduplicated `(sentence, position)` witnesses.
    pub words: Vec<(SentenceId, usize)>,
}

impl Violation {
    fn new(kind: ViolationKind, mut words: Vec<(SentenceId, usize)>) -> Violation {
        words.sort();
        words.dedup();
        Violation { kind, words }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violation at", self.kind)?;
        for (sid, pos) in &self.words {
            write!(f, " s{sid}:{pos}")?;
        }
        Ok(())
    }
}

/// Pairs that reuse a position on either side.
pub fn check_injectivity<S>(alignment: &Alignment<S>) -> Vec<Violation> {
    let mut out = BTreeSet::new();
    for (a, &(i1, j1)) in alignment.pairs.iter().enumerate() {
        for &(i2, j2) in &alignment.pairs[a + 1..] {
            if i1 == i2 || j1 == j2 {
                out.insert(Violation::new(
                    ViolationKind::Injectivity,
                    vec![
                        (alignment.s1, i1),
                        (alignment.s2, j1),
                        (alignment.s1, i2),
                        (alignment.s2, j2),
                    ],
                ));
            }
        }
    }
    out.into_iter().collect()
}

/// Pairs that cross: sorted by position in one sentence, positions in the
/// other must be strictly increasing.
pub fn check_monotonicity<S>(alignment: &Alignment<S>) -> Vec<Violation> {
    let mut out = BTreeSet::new();
    for (a, &(i1, j1)) in alignment.pairs.iter().enumerate() {
        for &(i2, j2) in &alignment.pairs[a + 1..] {
            let ordered = (i1 < i2 && j1 < j2) || (i1 > i2 && j1 > j2);
            if !ordered {
                out.insert(Violation::new(
                    ViolationKind::Monotonicity,
                    vec![
                        (alignment.s1, i1),
                        (alignment.s2, j1),
                        (alignment.s1, i2),
                        (alignment.s2, j2),
                    ],
                ));
            }
        }
    }
    out.into_iter().collect()
}

/// Word-to-word map over a whole alignment set: each aligned word knows its
/// counterpart in every other sentence it is aligned with.
fn word_map<S>(
    alignments: &[Alignment<S>],
) -> BTreeMap<(SentenceId, usize), BTreeMap<SentenceId, usize>> {
    let mut map: BTreeMap<(SentenceId, usize), BTreeMap<SentenceId, usize>> = BTreeMap::new();
    for a in alignments {
        for &(i, j) in &a.pairs {
            map.entry((a.s1, i)).or_default().insert(a.s2, j);
            map.entry((a.s2, j)).or_default().insert(a.s1, i);
        }
    }
    map
}

/// Alignment chains that contradict a direct alignment. With `strict`,
/// a chain whose direct alignment is silent (the two outer words simply
/// unaligned with each other) is also flagged; by default such gaps pass.
pub fn check_transitivity<S>(alignments: &[Alignment<S>], strict: bool) -> Vec<Violation> {
    let map = word_map(alignments);
    let mut out = BTreeSet::new();
    for (&center, nbrs) in &map {
        let entries: Vec<(SentenceId, usize)> = nbrs.iter().map(|(&s, &p)| (s, p)).collect();
        for (x, &(b, j)) in entries.iter().enumerate() {
            for &(c, k) in &entries[x + 1..] {
                match map.get(&(b, j)).and_then(|m| m.get(&c)) {
                    Some(&k2) if k2 == k => {}
                    Some(&k2) => {
                        out.insert(Violation::new(
                            ViolationKind::Transitivity,
                            vec![center, (b, j), (c, k), (c, k2)],
                        ));
                    }
                    None if strict => {
                        out.insert(Violation::new(
                            ViolationKind::Transitivity,
                            vec![center, (b, j), (c, k)],
                        ));
                    }
                    None => {}
                }
            }
        }
    }
    out.into_iter().collect()
}

/// All three condition checks over a set, deduplicated and sorted.
pub fn check_alignment_set<S>(alignments: &[Alignment<S>], strict: bool) -> Vec<Violation> {
    let mut out: BTreeSet<Violation> = BTreeSet::new();
    for a in alignments {
        out.extend(check_injectivity(a));
        out.extend(check_monotonicity(a));
    }
    out.extend(check_transitivity(alignments, strict));
    out.into_iter().collect()
}

/// How sentences are admitted into groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionConfig {
    /// Flag transitive chains whose direct alignment is missing, not just
    /// chains it contradicts.
    pub strict_transitivity: bool,
    /// Probe the contraction of every candidate group and reject joins
    /// that would not form a DAG. On by default; turning it off makes
    /// [`crate::graph::contract_group`] fallible.
    pub require_acyclic: bool,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            strict_transitivity: false,
            require_acyclic: true,
        }
    }
}

/// A set of sentences whose pairwise alignments satisfy the compatibility
/// conditions (and, by default, contract into a DAG).
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibleGroup<S = Score> {
    /// Member sentences, ascending.
    pub sentences: Vec<SentenceId>,
    /// The pairwise alignments among members, sorted by `(s1, s2)`.
    pub alignments: Vec<Alignment<S>>,
}

impl<S> CompatibleGroup<S> {
    pub fn contains(&self, sid: SentenceId) -> bool {
        self.sentences.binary_search(&sid).is_ok()
    }

    pub fn alignment(&self, a: SentenceId, b: SentenceId) -> Option<&Alignment<S>> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.alignments
            .iter()
            .find(|al| (al.s1, al.s2) == (lo, hi) || (al.s2, al.s1) == (lo, hi))
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// Group under construction. The merged-token classes and the word map
/// are kept up to date as members join, so admitting one more sentence
/// costs a replay of the group, never a rebuild from every pairwise
/// alignment accumulated so far.
struct GroupState<'a, S> {
    sentences: Vec<SentenceId>,
    alignments: Vec<&'a Alignment<S>>,
    word_map: HashMap<(SentenceId, usize), BTreeMap<SentenceId, usize>>,
    /// Group-local token index: a member's token lives at
    /// `offsets[sid] + position`.
    offsets: BTreeMap<SentenceId, usize>,
    token_total: usize,
    /// Merged-token classes accumulated over the members joined so far.
    uf: UnionFind,
}

impl<'a, S: Scalar> GroupState<'a, S> {
    fn new(doc: &Document, sid: SentenceId) -> Self {
        let len = doc.sentence(sid).map(|s| s.len()).unwrap_or(0);
        GroupState {
            sentences: vec![sid],
            alignments: Vec::new(),
            word_map: HashMap::new(),
            offsets: BTreeMap::from([(sid, 0)]),
            token_total: len,
            uf: UnionFind::new(len),
        }
    }

    /// Union the new sentence's aligned tokens into `uf`, mapping group
    /// members through `offsets` and `sid` to `new_base`.
    fn union_new_pairs(
        offsets: &BTreeMap<SentenceId, usize>,
        uf: &mut UnionFind,
        sid: SentenceId,
        new_base: usize,
        new_aligns: &[&'a Alignment<S>],
    ) {
        for a in new_aligns {
            for &(i, j) in &a.pairs {
                let x = if a.s1 == sid {
                    new_base + i
                } else {
                    offsets[&a.s1] + i
                };
                let y = if a.s2 == sid {
                    new_base + j
                } else {
                    offsets[&a.s2] + j
                };
                uf.union(x, y);
            }
        }
    }

    /// Try to admit `sid` with its alignments to current members. Checks
    /// the pairwise conditions on the new alignments, the transitive
    /// chains that pass through the new sentence, and (optionally) that
    /// the enlarged group still contracts into a DAG.
    fn try_join(
        &mut self,
        doc: &Document,
        sid: SentenceId,
        new_aligns: &[&'a Alignment<S>],
        cfg: &PartitionConfig,
    ) -> bool {
        for a in new_aligns {
            if !self.alignment_is_sound(doc, a) {
                return false;
            }
        }

        // The chain checks below matter only when they can change the
        // decision. In lenient mode a chain contradiction forces two
        // positions of one sentence into the same merged class, which the
        // contraction probe rejects as an occurrence collision — so with
        // the probe on, the loops repeat work the probe already does, and
        // skipping them keeps joins quadratic instead of cubic overall.
        let need_chains = cfg.strict_transitivity || !cfg.require_acyclic;

        if need_chains {
            // counterpart in `sid` of each already-grouped word, per the
            // new alignments, plus the reverse view
            let mut to_sid: HashMap<(SentenceId, usize), usize> = HashMap::new();
            let mut from_sid: BTreeMap<usize, Vec<(SentenceId, usize)>> = BTreeMap::new();
            for a in new_aligns {
                for &(i, j) in &a.pairs {
                    let (old, pos_sid) = if a.s2 == sid {
                        ((a.s1, i), j)
                    } else {
                        ((a.s2, j), i)
                    };
                    to_sid.insert(old, pos_sid);
                    from_sid.entry(pos_sid).or_default().push(old);
                }
            }

            // chains centered on a word of `sid`: both outer words are
            // old, their direct alignment is already in the word map
            for olds in from_sid.values() {
                for (x, &(b, j)) in olds.iter().enumerate() {
                    for &(c, k) in &olds[x + 1..] {
                        match self.word_map.get(&(b, j)).and_then(|m| m.get(&c)) {
                            Some(&k2) if k2 == k => {}
                            Some(_) => return false,
                            None if cfg.strict_transitivity => return false,
                            None => {}
                        }
                    }
                }
            }

            // chains centered on an old word with one leg into `sid`: the
            // old word's other neighbors must agree with the new alignments
            for (&old, &pos_sid) in &to_sid {
                if let Some(nbrs) = self.word_map.get(&old) {
                    for (&other, &other_pos) in nbrs {
                        match to_sid.get(&(other, other_pos)) {
                            Some(&j2) if j2 == pos_sid => {}
                            Some(_) => return false,
                            None if cfg.strict_transitivity => return false,
                            None => {}
                        }
                    }
                }
            }
        }

        let new_len = doc.sentence(sid).map(|s| s.len()).unwrap_or(0);
        let new_base = self.token_total;
        if cfg.require_acyclic {
            // Probe the contraction on a scratch copy of the merged
            // classes; adopt it only if the enlarged group stays a DAG.
            let mut uf = self.uf.clone();
            uf.grow(new_len);
            Self::union_new_pairs(&self.offsets, &mut uf, sid, new_base, new_aligns);
            let mut members = self.sentences.clone();
            members.push(sid);
            members.sort_unstable();
            let mut offsets = self.offsets.clone();
            offsets.insert(sid, new_base);
            if contract_from_state(doc, &members, &offsets, &mut uf).is_err() {
                return false;
            }
            self.uf = uf;
        } else {
            self.uf.grow(new_len);
            Self::union_new_pairs(&self.offsets, &mut self.uf, sid, new_base, new_aligns);
        }
        self.offsets.insert(sid, new_base);
        self.token_total = new_base + new_len;

        self.sentences.push(sid);
        if need_chains {
            for a in new_aligns {
                for &(i, j) in &a.pairs {
                    self.word_map.entry((a.s1, i)).or_default().insert(a.s2, j);
                    self.word_map.entry((a.s2, j)).or_default().insert(a.s1, i);
                }
            }
        }
        self.alignments.extend(new_aligns.iter().copied());
        true
    }

    /// Injectivity and monotonicity of one alignment, plus position ranges.
    fn alignment_is_sound(&self, doc: &Document, a: &Alignment<S>) -> bool {
        let (len1, len2) = match (doc.sentence(a.s1), doc.sentence(a.s2)) {
            (Some(s1), Some(s2)) => (s1.len(), s2.len()),
            _ => return false,
        };
        if a.pairs.iter().any(|&(i, j)| i >= len1 || j >= len2) {
            return false;
        }
        for (x, &(i1, j1)) in a.pairs.iter().enumerate() {
            for &(i2, j2) in &a.pairs[x + 1..] {
                let ordered = (i1 < i2 && j1 < j2) || (i1 > i2 && j1 > j2);
                if !ordered {
                    return false;
                }
            }
        }
        true
    }
}

/// Greedily partition the document's sentences into compatible groups.
///
/// Sentences are visited in document order; each joins the oldest group
/// that admits it, or founds a new one. Deterministic given its inputs.
/// Alignments are looked up by unordered sentence pair; self-alignments
/// are ignored.
pub fn partition_into_groups<S: Scalar>(
    doc: &Document,
    alignments: &[Alignment<S>],
    cfg: &PartitionConfig,
) -> Vec<CompatibleGroup<S>> {
    let mut index: BTreeMap<(SentenceId, SentenceId), &Alignment<S>> = BTreeMap::new();
    for a in alignments {
        if a.s1 == a.s2 {
            continue;
        }
        let key = if a.s1 <= a.s2 {
            (a.s1, a.s2)
        } else {
            (a.s2, a.s1)
        };
        index.insert(key, a);
    }

    let mut states: Vec<GroupState<S>> = Vec::new();
    for sentence in &doc.sentences {
        let sid = sentence.id;
        let mut placed = false;
        for state in &mut states {
            let new_aligns: Vec<&Alignment<S>> = state
                .sentences
                .iter()
                .filter_map(|&m| {
                    let key = if m <= sid { (m, sid) } else { (sid, m) };
                    index.get(&key).copied()
                })
                .collect();
            if state.try_join(doc, sid, &new_aligns, cfg) {
                placed = true;
                break;
            }
        }
        if !placed {
            states.push(GroupState::new(doc, sid));
        }
    }

    states
        .into_iter()
        .map(|state| {
            let mut alignments: Vec<Alignment<S>> =
                state.alignments.into_iter().cloned().collect();
            alignments.sort_by_key(|a| (a.s1, a.s2));
            CompatibleGroup {
                sentences: state.sentences,
                alignments,
            }
        })
        .collect()
}
