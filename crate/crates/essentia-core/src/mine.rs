//! Reading paraphrases off the word-alignment graph.
//!
//! Two internally disjoint paths between the same pair of nodes carry
//! interchangeable phrases — each path is how some sentence fills the gap
//! between the shared anchor words. A path that reconnects two directly
//! adjacent nodes marks its interior as optional: some sentence says it,
//! another skips it. The default filter keeps only pairs of short verb
//! phrases, the shape that yields reliable domain paraphrases; `All` mode
//! emits every parallel-path pair.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::{Document, PosTag, SentenceId};
use crate::error::{Error, Result};
use crate::graph::{NodeId, WordAlignmentGraph};
use crate::lexicon::VerbLexicon;

/// Which candidate pairs survive filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterMode {
    /// Keep pairs where both phrases start with a verb and are short.
    #[default]
    VerbPhrase,
    /// Keep every pair of parallel phrases.
    All,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MineConfig {
    /// Longest path interior considered when enumerating parallel paths.
    pub max_internal_len: usize,
    /// Longest phrase (in tokens) the verb filter accepts.
    pub max_phrase_len: usize,
    pub filter_mode: FilterMode,
}

impl Default for MineConfig {
    fn default() -> Self {
        MineConfig {
            max_internal_len: 6,
            max_phrase_len: 3,
            filter_mode: FilterMode::default(),
        }
    }
}

impl MineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_internal_len == 0 {
            return Err(Error::InvalidConfig(
                "max internal length must be at least 1".to_string(),
            ));
        }
        if self.max_phrase_len == 0 {
            return Err(Error::InvalidConfig(
                "max phrase length must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// A simple path `from → interior → to` together with the sentences that
/// take it end to end (the intersection of its edge supports).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PhrasePath {
    pub from: NodeId,
    pub to: NodeId,
    /// Interior nodes, in path order; never empty, never START or END.
    pub internal: Vec<NodeId>,
    pub support: BTreeSet<SentenceId>,
}

impl PhrasePath {
    /// The phrase the path spells out: interior labels joined by spaces.
    pub fn phrase(&self, graph: &WordAlignmentGraph) -> String {
        self.internal
            .iter()
            .map(|&n| graph.node(n).label.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn disjoint_with(&self, other: &PhrasePath) -> bool {
        self.internal.iter().all(|n| !other.internal.contains(n))
    }
}

/// Parallel paths between one anchor pair: pairwise internally disjoint,
/// so every two of them are candidate paraphrases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub from: NodeId,
    pub to: NodeId,
    pub paths: Vec<PhrasePath>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PairCategory {
    Verb,
    Other,
}

impl PairCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            PairCategory::Verb => "verb",
            PairCategory::Other => "other",
        }
    }
}

/// One mined paraphrase pair; `phrase_a` is lexicographically the smaller
/// side, so the pair is canonical regardless of discovery order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ParaphrasePair {
    pub phrase_a: String,
    pub phrase_b: String,
    pub from: NodeId,
    pub to: NodeId,
    pub support_a: BTreeSet<SentenceId>,
    pub support_b: BTreeSet<SentenceId>,
    pub category: PairCategory,
}

/// A phrase some sentences include and at least one sentence skips.
/// Field order doubles as the sort order: anchors first, then the phrase
/// text, so listings read anchor by anchor alphabetically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OptionalPhrase {
    pub from: NodeId,
    pub to: NodeId,
    pub phrase: String,
    pub internal: Vec<NodeId>,
    /// Sentences that say the phrase.
    pub support: BTreeSet<SentenceId>,
    /// Sentences that take the direct edge instead.
    pub bypass_support: BTreeSet<SentenceId>,
}

/// All simple paths with 1..=`max_internal` interior nodes, grouped by
/// anchor pair. Only anchors that can branch (out-degree ≥ 2) can carry
/// parallel paths or optional phrases, so enumeration starts there. Paths
/// whose edge supports share no sentence are pruned: nobody says them.
fn all_paths(
    graph: &WordAlignmentGraph,
    max_internal: usize,
) -> BTreeMap<(NodeId, NodeId), Vec<PhrasePath>> {
    let mut out: BTreeMap<(NodeId, NodeId), Vec<PhrasePath>> = BTreeMap::new();
    let universe: BTreeSet<SentenceId> = graph.sentences().into_iter().collect();
    for node in graph.nodes() {
        if graph.out_degree(node.id) >= 2 {
            let mut internal = Vec::new();
            extend(graph, node.id, node.id, &mut internal, &universe, max_internal, &mut out);
        }
    }
    for paths in out.values_mut() {
        paths.sort();
    }
    out
}

fn extend(
    graph: &WordAlignmentGraph,
    from: NodeId,
    last: NodeId,
    internal: &mut Vec<NodeId>,
    support: &BTreeSet<SentenceId>,
    max_internal: usize,
    out: &mut BTreeMap<(NodeId, NodeId), Vec<PhrasePath>>,
) {
    for (next, edge_support) in graph.successors(last) {
        let support: BTreeSet<SentenceId> =
            support.intersection(edge_support).copied().collect();
        if support.is_empty() {
            continue;
        }
        if !internal.is_empty() {
            out.entry((from, next)).or_default().push(PhrasePath {
                from,
                to: next,
                internal: internal.clone(),
                support: support.clone(),
            });
        }
        if internal.len() < max_internal && next != graph.end() {
            internal.push(next);
            extend(graph, from, next, internal, &support, max_internal, out);
            internal.pop();
        }
    }
}

/// Maximal cliques (size ≥ 2) of the path-disjointness relation.
fn disjoint_cliques(paths: &[PhrasePath]) -> Vec<Vec<usize>> {
    let n = paths.len();
    let adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && paths[i].disjoint_with(&paths[j]))
                .collect()
        })
        .collect();
    let mut cliques = Vec::new();
    let mut r = Vec::new();
    bron_kerbosch(&mut r, (0..n).collect(), Vec::new(), &adj, &mut cliques);
    cliques.sort();
    cliques
}

fn bron_kerbosch(
    r: &mut Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    adj: &[BTreeSet<usize>],
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        if r.len() >= 2 {
            out.push(r.clone());
        }
        return;
    }
    while let Some(v) = p.first().copied() {
        r.push(v);
        let p2 = p.iter().copied().filter(|w| adj[v].contains(w)).collect();
        let x2 = x.iter().copied().filter(|w| adj[v].contains(w)).collect();
        bron_kerbosch(r, p2, x2, adj, out);
        r.pop();
        p.remove(0);
        x.push(v);
    }
}

/// Find every set of parallel phrases: anchor pairs joined by two or more
/// internally disjoint paths that at least one sentence each actually says.
pub fn enumerate_parallel_paths(
    graph: &WordAlignmentGraph,
    cfg: &MineConfig,
) -> Vec<CandidateSet> {
    let mut sets = Vec::new();
    for ((from, to), paths) in all_paths(graph, cfg.max_internal_len) {
        if paths.len() < 2 {
            continue;
        }
        for clique in disjoint_cliques(&paths) {
            sets.push(CandidateSet {
                from,
                to,
                paths: clique.into_iter().map(|i| paths[i].clone()).collect(),
            });
        }
    }
    sets
}

/// Does the phrase spelled from this node start with a verb? Tagged
/// occurrences win: any VERB tag makes it a verb, any other known tag
/// rules it out; untagged input falls back to the built-in verb list.
fn starts_with_verb(doc: &Document, graph: &WordAlignmentGraph, node: NodeId) -> bool {
    let mut any_tagged = false;
    for &(sid, pos) in &graph.node(node).occurrences {
        if let Some(tok) = doc.sentence(sid).and_then(|s| s.tokens.get(pos)) {
            match tok.pos {
                PosTag::Verb => return true,
                PosTag::Unknown => {}
                _ => any_tagged = true,
            }
        }
    }
    if any_tagged {
        return false;
    }
    VerbLexicon::builtin().is_verb(&graph.node(node).label)
}

/// Turn candidate sets into canonical paraphrase pairs.
///
/// Every two paths of a set pair up. `VerbPhrase` mode keeps a pair only
/// when both phrases start with a verb and have at most `max_phrase_len`
/// tokens; `All` mode keeps everything but still labels the verb pairs.
/// Pairs of identical phrases are dropped, the two sides are ordered
/// lexicographically, and the result is sorted and deduplicated.
pub fn filter_candidates(
    doc: &Document,
    graph: &WordAlignmentGraph,
    sets: &[CandidateSet],
    cfg: &MineConfig,
) -> Vec<ParaphrasePair> {
    let mut out: BTreeSet<ParaphrasePair> = BTreeSet::new();
    for set in sets {
        for (a, pa) in set.paths.iter().enumerate() {
            for pb in &set.paths[a + 1..] {
                let text_a = pa.phrase(graph);
                let text_b = pb.phrase(graph);
                if text_a == text_b {
                    continue;
                }
                let is_verb_pair = pa.internal.len() <= cfg.max_phrase_len
                    && pb.internal.len() <= cfg.max_phrase_len
                    && starts_with_verb(doc, graph, pa.internal[0])
                    && starts_with_verb(doc, graph, pb.internal[0]);
                if cfg.filter_mode == FilterMode::VerbPhrase && !is_verb_pair {
                    continue;
                }
                let category = if is_verb_pair {
                    PairCategory::Verb
                } else {
                    PairCategory::Other
                };
                let ((phrase_a, support_a), (phrase_b, support_b)) = if text_a <= text_b {
                    ((text_a, pa.support.clone()), (text_b, pb.support.clone()))
                } else {
                    ((text_b, pb.support.clone()), (text_a, pa.support.clone()))
                };
                out.insert(ParaphrasePair {
                    phrase_a,
                    phrase_b,
                    from: set.from,
                    to: set.to,
                    support_a,
                    support_b,
                    category,
                });
            }
        }
    }
    out.into_iter().collect()
}

/// Phrases bypassed by a direct edge: between two directly connected
/// nodes, any longer path is something only some of the sentences say.
pub fn detect_optional_phrases(
    graph: &WordAlignmentGraph,
    cfg: &MineConfig,
) -> Vec<OptionalPhrase> {
    let mut out = Vec::new();
    for ((from, to), paths) in all_paths(graph, cfg.max_internal_len) {
        let Some(bypass) = graph.edge_support(from, to) else {
            continue;
        };
        for path in paths {
            out.push(OptionalPhrase {
                from,
                to,
                phrase: path.phrase(graph),
                internal: path.internal,
                support: path.support,
                bypass_support: bypass.clone(),
            });
        }
    }
    out.sort();
    out
}

/// Walk every START→END path in successor order and spell out its labels,
/// stopping once `limit` sentences have been produced. The graph's own
/// sentences always reappear; combining branches of different inputs
/// yields new ones.
pub fn generate_sentences(graph: &WordAlignmentGraph, limit: usize) -> Vec<String> {
    fn walk<'g>(
        graph: &'g WordAlignmentGraph,
        node: NodeId,
        labels: &mut Vec<&'g str>,
        out: &mut Vec<String>,
        limit: usize,
    ) {
        for (next, _) in graph.successors(node) {
            if out.len() >= limit {
                return;
            }
            if next == graph.end() {
                if !labels.is_empty() {
                    out.push(labels.join(" "));
                }
            } else {
                labels.push(graph.node(next).label.as_str());
                walk(graph, next, labels, out, limit);
                labels.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(graph, graph.start(), &mut Vec::new(), &mut out, limit);
    out
}

/// The sentence with its optional phrases removed.
///
/// Occurrences of optional phrases in the sentence's path are collected as
/// runs, sorted by start (longer first on ties), and removed greedily left
/// to right without overlap; what remains is joined with spaces.
pub fn essential_form(
    graph: &WordAlignmentGraph,
    optionals: &[OptionalPhrase],
    sid: SentenceId,
) -> Result<String> {
    let path = graph.sentence_path(sid)?;
    let words = &path[1..path.len() - 1];

    let mut runs: Vec<(usize, usize)> = Vec::new();
    for o in optionals {
        if !o.support.contains(&sid) {
            continue;
        }
        if let Some(start) = words.iter().position(|&n| n == o.internal[0]) {
            if words[start..].starts_with(&o.internal) {
                runs.push((start, o.internal.len()));
            }
        }
    }
    runs.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));

    let mut removed = vec![false; words.len()];
    let mut cursor = 0usize;
    for (start, len) in runs {
        if start >= cursor {
            removed[start..start + len].iter_mut().for_each(|r| *r = true);
            cursor = start + len;
        }
    }

    let kept: Vec<&str> = words
        .iter()
        .zip(&removed)
        .filter(|(_, &r)| !r)
        .map(|(&n, _)| graph.node(n).label.as_str())
        .collect();
    Ok(kept.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aligner::{align_all_pairs, AlignerConfig, AlignResources};
    use crate::compat::{partition_into_groups, PartitionConfig};
    use crate::corpus::{load_corpus, load_tagged, MaskConfig};
    use crate::graph::contract_group;
    use std::io::Cursor;

    fn build(text: &str) -> (Document, WordAlignmentGraph) {
        let doc = load_corpus(Cursor::new(text), "t", &MaskConfig::default()).unwrap();
        let alignments =
            align_all_pairs(&doc, &AlignerConfig::<f64>::default(), &AlignResources::default()).unwrap();
        let groups = partition_into_groups(&doc, &alignments, &PartitionConfig::default());
        assert_eq!(groups.len(), 1, "expected a single group");
        let graph = contract_group(&doc, &groups[0]).unwrap();
        (doc, graph)
    }

    fn economy() -> (Document, WordAlignmentGraph) {
        build(
            "The world economy has fully recovered from the crisis.\n\
             The world economy has shrugged off the crisis completely.\n\
             The world economy has gotten rid of the crisis already.\n",
        )
    }

    fn phrases(graph: &WordAlignmentGraph, set: &CandidateSet) -> Vec<String> {
        set.paths.iter().map(|p| p.phrase(graph)).collect()
    }

    #[test]
    fn economy_graph_has_two_candidate_sets() {
        let (_, graph) = economy();
        let sets = enumerate_parallel_paths(&graph, &MineConfig::default());
        assert_eq!(sets.len(), 2);

        let branches = &sets[0];
        let mut texts = phrases(&graph, branches);
        texts.sort();
        assert_eq!(texts, vec!["fully recovered from", "gotten rid of", "shrugged off"]);
        assert_eq!(branches.paths.len(), 3);

        let adverbs = &sets[1];
        let mut texts = phrases(&graph, adverbs);
        texts.sort();
        assert_eq!(texts, vec!["already", "completely"]);
    }

    #[test]
    fn paths_nobody_says_are_pruned() {
        let (_, graph) = economy();
        let sets = enumerate_parallel_paths(
            &graph,
            &MineConfig {
                max_internal_len: 10,
                ..MineConfig::default()
            },
        );
        // even with a generous length bound, no anchor pair gains a path
        // stitched from different sentences' edges
        for set in &sets {
            for path in &set.paths {
                assert!(!path.support.is_empty());
            }
        }
        assert_eq!(sets.len(), 2);
    }

    #[test]
    fn verb_filter_keeps_only_verb_initial_short_pairs() {
        let (doc, graph) = economy();
        let sets = enumerate_parallel_paths(&graph, &MineConfig::default());
        let pairs = filter_candidates(&doc, &graph, &sets, &MineConfig::default());
        assert_eq!(pairs.len(), 1);
        let p = &pairs[0];
        assert_eq!(p.phrase_a, "gotten rid of");
        assert_eq!(p.phrase_b, "shrugged off");
        assert_eq!(p.category, PairCategory::Verb);
        assert_eq!(p.support_a.iter().map(|s| s.0).collect::<Vec<_>>(), vec![2]);
        assert_eq!(p.support_b.iter().map(|s| s.0).collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn all_mode_keeps_every_pair() {
        let (doc, graph) = economy();
        let cfg = MineConfig {
            filter_mode: FilterMode::All,
            ..MineConfig::default()
        };
        let sets = enumerate_parallel_paths(&graph, &cfg);
        let pairs = filter_candidates(&doc, &graph, &sets, &cfg);
        let texts: Vec<(&str, &str)> = pairs
            .iter()
            .map(|p| (p.phrase_a.as_str(), p.phrase_b.as_str()))
            .collect();
        assert_eq!(
            texts,
            vec![
                ("already", "completely"),
                ("fully recovered from", "gotten rid of"),
                ("fully recovered from", "shrugged off"),
                ("gotten rid of", "shrugged off"),
            ]
        );
        // the adverb pair and the non-verb-initial pairs are not verb pairs
        assert_eq!(
            pairs.iter().filter(|p| p.category == PairCategory::Verb).count(),
            1
        );
    }

    #[test]
    fn phrase_length_cap_applies_to_both_sides() {
        let (doc, graph) = economy();
        let cfg = MineConfig {
            max_phrase_len: 2,
            ..MineConfig::default()
        };
        let sets = enumerate_parallel_paths(&graph, &cfg);
        // "gotten rid of" has three tokens, so the verb pair is gone
        let pairs = filter_candidates(&doc, &graph, &sets, &cfg);
        assert!(pairs.is_empty());
    }

    #[test]
    fn optional_phrases_have_bypass_support() {
        let (_, graph) = economy();
        let optionals = detect_optional_phrases(&graph, &MineConfig::default());
        let texts: Vec<&str> = optionals.iter().map(|o| o.phrase.as_str()).collect();
        assert_eq!(texts, vec!["already", "completely"]);
        for o in &optionals {
            // the sentence that skips the adverb supports the direct edge
            assert_eq!(
                o.bypass_support.iter().map(|s| s.0).collect::<Vec<_>>(),
                vec![0]
            );
            assert_eq!(o.support.len(), 1);
        }
    }

    #[test]
    fn generation_recombines_branches() {
        let (doc, graph) = economy();
        let stripped = graph.strip_punct();
        let generated = generate_sentences(&stripped, 10_000);
        let originals: Vec<String> = doc
            .sentences
            .iter()
            .map(|s| {
                s.normals()
                    .into_iter()
                    .filter(|w| !crate::corpus::is_punct_label(w))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        for original in &originals {
            assert!(generated.contains(original), "missing original: {original}");
        }
        let novel = "the world economy has gotten rid of the crisis completely";
        assert!(generated.contains(&novel.to_string()));
        assert!(generated.len() > originals.len());
    }

    #[test]
    fn generation_respects_the_limit() {
        let (_, graph) = economy();
        let generated = generate_sentences(&graph, 2);
        assert_eq!(generated.len(), 2);
    }

    #[test]
    fn essential_form_strips_optional_adverbs() {
        let (_, graph) = economy();
        let optionals = detect_optional_phrases(&graph, &MineConfig::default());
        assert_eq!(
            essential_form(&graph, &optionals, SentenceId(0)).unwrap(),
            "the world economy has fully recovered from the crisis ."
        );
        assert_eq!(
            essential_form(&graph, &optionals, SentenceId(1)).unwrap(),
            "the world economy has shrugged off the crisis ."
        );
        assert_eq!(
            essential_form(&graph, &optionals, SentenceId(2)).unwrap(),
            "the world economy has gotten rid of the crisis ."
        );
    }

    #[test]
    fn essential_form_for_unknown_sentence_errors() {
        let (_, graph) = economy();
        let res = essential_form(&graph, &[], SentenceId(9));
        assert!(matches!(res, Err(Error::SentenceNotInGraph(SentenceId(9)))));
    }

    #[test]
    fn anchors_at_start_work() {
        let (doc, graph) = build("send my location\nshare my location\n");
        let sets = enumerate_parallel_paths(&graph, &MineConfig::default());
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].from, graph.start());
        let pairs = filter_candidates(&doc, &graph, &sets, &MineConfig::default());
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].phrase_a, "send");
        assert_eq!(pairs[0].phrase_b, "share");
    }

    #[test]
    fn supplied_tags_override_the_verb_lexicon() {
        // same two sentences, but the branching words are tagged as nouns
        let tagged = "send\tNOUN\tNONE\nmy\tDET\tNONE\nlocation\tNOUN\tNONE\n\n\
                      share\tNOUN\tNONE\nmy\tDET\tNONE\nlocation\tNOUN\tNONE\n";
        let doc = load_tagged(Cursor::new(tagged), "t").unwrap();
        let alignments =
            align_all_pairs(&doc, &AlignerConfig::<f64>::default(), &AlignResources::default()).unwrap();
        let groups = partition_into_groups(&doc, &alignments, &PartitionConfig::default());
        let graph = contract_group(&doc, &groups[0]).unwrap();
        let sets = enumerate_parallel_paths(&graph, &MineConfig::default());
        assert_eq!(sets.len(), 1);
        let pairs = filter_candidates(&doc, &graph, &sets, &MineConfig::default());
        assert!(pairs.is_empty(), "noun-tagged words must not pass the verb filter");
        // a VERB tag forces the other way even for unknown words
        let tagged = "blorf\tVERB\tNONE\nmy\tDET\tNONE\nlocation\tNOUN\tNONE\n\n\
                      zung\tVERB\tNONE\nmy\tDET\tNONE\nlocation\tNOUN\tNONE\n";
        let doc = load_tagged(Cursor::new(tagged), "t").unwrap();
        let alignments =
            align_all_pairs(&doc, &AlignerConfig::<f64>::default(), &AlignResources::default()).unwrap();
        let groups = partition_into_groups(&doc, &alignments, &PartitionConfig::default());
        let graph = contract_group(&doc, &groups[0]).unwrap();
        let sets = enumerate_parallel_paths(&graph, &MineConfig::default());
        let pairs = filter_candidates(&doc, &graph, &sets, &MineConfig::default());
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].category, PairCategory::Verb);
    }

    #[test]
    fn identical_phrases_never_pair() {
        // two distinct nodes can share a label (here, two NUM masks); a
        // candidate set pairing them is not a paraphrase
        let (doc, graph) = build("add 5\nadd 7 to 9\n");
        let nums: Vec<NodeId> = graph
            .nodes()
            .iter()
            .filter(|n| n.label == "NUM")
            .map(|n| n.id)
            .collect();
        assert_eq!(nums.len(), 2);
        let path = |node: NodeId, sid: usize| PhrasePath {
            from: graph.start(),
            to: graph.end(),
            internal: vec![node],
            support: [SentenceId(sid)].into_iter().collect(),
        };
        let set = CandidateSet {
            from: graph.start(),
            to: graph.end(),
            paths: vec![path(nums[0], 0), path(nums[1], 1)],
        };
        let cfg = MineConfig {
            filter_mode: FilterMode::All,
            ..MineConfig::default()
        };
        let pairs = filter_candidates(&doc, &graph, &[set], &cfg);
        assert!(pairs.is_empty());
    }

    #[test]
    fn config_validation_rejects_zeroes() {
        let cfg = MineConfig {
            max_internal_len: 0,
            ..MineConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = MineConfig {
            max_phrase_len: 0,
            ..MineConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
