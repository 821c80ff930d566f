//! The word-alignment graph: aligned tokens contract into shared nodes.
//!
//! Each compatible group of sentences becomes one directed acyclic graph
//! with a unique START and END node. Every token occurrence belongs to
//! exactly one word node, and every member sentence is recoverable as a
//! START→END path. Node ids are topological ranks (START is 0, END is the
//! highest id), so every edge goes from a lower id to a higher one and all
//! serialized artifacts come out in one canonical order.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::compat::CompatibleGroup;
use crate::corpus::{is_punct_label, Document, SentenceId};
use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::{Alignment, Scalar};

/// Node identifier; doubles as the node's topological rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId(pub usize);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Start,
    End,
    Word,
}

/// A merged cluster of aligned token occurrences.
///
/// The label is the normal form of the earliest occurrence (by sentence id,
/// then position); aligned tokens usually share it, but synonym or
/// embedding matches may merge distinct normals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub label: String,
    /// `(sentence, position)` of every merged token, sorted.
    pub occurrences: Vec<(SentenceId, usize)>,
}

impl Node {
    pub fn is_word(&self) -> bool {
        self.kind == NodeKind::Word
    }
}

/// One contracted group: a DAG in which every member sentence is a
/// START→END path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordAlignmentGraph {
    nodes: Vec<Node>,
    edges: BTreeMap<(NodeId, NodeId), BTreeSet<SentenceId>>,
    start: NodeId,
    end: NodeId,
    /// Full node path per member sentence, START and END included.
    paths: BTreeMap<SentenceId, Vec<NodeId>>,
}

/// Node under construction: label plus merged occurrences.
struct ProtoNode {
    label: String,
    occurrences: Vec<(SentenceId, usize)>,
}

impl WordAlignmentGraph {
    pub fn start(&self) -> NodeId {
        self.start
    }

    pub fn end(&self) -> NodeId {
        self.end
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// All edges with their supporting sentences, in `(from, to)` order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, &BTreeSet<SentenceId>)> {
        self.edges.iter().map(|(&(u, v), s)| (u, v, s))
    }

    pub fn edge_support(&self, from: NodeId, to: NodeId) -> Option<&BTreeSet<SentenceId>> {
        self.edges.get(&(from, to))
    }

    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.edges.contains_key(&(from, to))
    }

    /// Successors of `from` in ascending id order, with edge support.
    pub fn successors(
        &self,
        from: NodeId,
    ) -> impl Iterator<Item = (NodeId, &BTreeSet<SentenceId>)> {
        self.edges
            .range((from, NodeId(0))..=(from, NodeId(usize::MAX)))
            .map(|(&(_, v), s)| (v, s))
    }

    pub fn out_degree(&self, from: NodeId) -> usize {
        self.successors(from).count()
    }

    /// Member sentences, ascending.
    pub fn sentences(&self) -> Vec<SentenceId> {
        self.paths.keys().copied().collect()
    }

    /// The sentence's node path including START and END.
    pub fn sentence_path(&self, sid: SentenceId) -> Result<&[NodeId]> {
        self.paths
            .get(&sid)
            .map(Vec::as_slice)
            .ok_or(Error::SentenceNotInGraph(sid))
    }

    /// Node labels along the sentence's path (word nodes only).
    pub fn sentence_labels(&self, sid: SentenceId) -> Result<Vec<&str>> {
        let path = self.sentence_path(sid)?;
        Ok(path[1..path.len() - 1]
            .iter()
            .map(|&n| self.node(n).label.as_str())
            .collect())
    }

    /// Copy of the graph with punctuation-only word nodes removed; each
    /// sentence path simply skips them, so the result is still a DAG with
    /// the path property.
    pub fn strip_punct(&self) -> WordAlignmentGraph {
        let keep: BTreeSet<NodeId> = self
            .nodes
            .iter()
            .filter(|n| n.is_word() && !is_punct_label(&n.label))
            .map(|n| n.id)
            .collect();
        let index_of: BTreeMap<NodeId, usize> =
            keep.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let protos: Vec<ProtoNode> = keep
            .iter()
            .map(|&id| ProtoNode {
                label: self.node(id).label.clone(),
                occurrences: self.node(id).occurrences.clone(),
            })
            .collect();
        let paths: Vec<(SentenceId, Vec<usize>)> = self
            .paths
            .iter()
            .map(|(&sid, path)| {
                let filtered = path
                    .iter()
                    .filter_map(|n| index_of.get(n).copied())
                    .collect();
                (sid, filtered)
            })
            .collect();
        finalize(protos, paths).expect("dropping nodes from a DAG cannot create a cycle")
    }

    /// Serialize to the versioned JSON form.
    pub fn to_json_value(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct NodeJson<'a> {
            id: NodeId,
            label: &'a str,
            kind: NodeKind,
            occurrences: &'a [(SentenceId, usize)],
        }
        #[derive(Serialize)]
        struct EdgeJson {
            from: NodeId,
            to: NodeId,
            support: Vec<SentenceId>,
        }
        #[derive(Serialize)]
        struct GraphJson<'a> {
            schema: &'static str,
            start: NodeId,
            end: NodeId,
            sentences: Vec<SentenceId>,
            nodes: Vec<NodeJson<'a>>,
            edges: Vec<EdgeJson>,
        }
        let json = GraphJson {
            schema: "wag-1",
            start: self.start,
            end: self.end,
            sentences: self.sentences(),
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeJson {
                    id: n.id,
                    label: &n.label,
                    kind: n.kind,
                    occurrences: &n.occurrences,
                })
                .collect(),
            edges: self
                .edges()
                .map(|(from, to, support)| EdgeJson {
                    from,
                    to,
                    support: support.iter().copied().collect(),
                })
                .collect(),
        };
        serde_json::to_value(json).expect("graph serializes")
    }

    /// Render as Graphviz DOT, left to right, START/END drawn as points.
    pub fn to_dot(&self) -> String {
        fn escape(label: &str) -> String {
            label.replace('\\', "\\\\").replace('"', "\\\"")
        }
        let mut out = String::from("digraph wag {\n  rankdir=LR;\n");
        for node in &self.nodes {
            match node.kind {
                NodeKind::Start | NodeKind::End => {
                    let _ = writeln!(out, "  n{} [shape=point];", node.id);
                }
                NodeKind::Word => {
                    let _ = writeln!(
                        out,
                        "  n{} [label=\"{} ({})\"];",
                        node.id,
                        escape(&node.label),
                        node.occurrences.len()
                    );
                }
            }
        }
        for (from, to, support) in self.edges() {
            let _ = writeln!(out, "  n{from} -> n{to} [label=\"{}\"];", support.len());
        }
        out.push_str("}\n");
        out
    }
}

/// Contract a compatible group into its word-alignment graph.
///
/// Aligned positions are merged with a union-find; the merged clusters, the
/// two boundary nodes, and the consecutive-token edges of every sentence
/// form the graph. Fails with [`Error::CycleDetected`] when the merge would
/// put two tokens of one sentence into the same node or otherwise break
/// acyclicity.
pub fn contract_group<S: Scalar>(
    doc: &Document,
    group: &CompatibleGroup<S>,
) -> Result<WordAlignmentGraph> {
    contract_parts(doc, &group.sentences, group.alignments.iter())
}

/// One graph per group, in group order.
pub fn assemble_graph<S: Scalar>(
    doc: &Document,
    groups: &[CompatibleGroup<S>],
) -> Result<Vec<WordAlignmentGraph>> {
    groups.iter().map(|g| contract_group(doc, g)).collect()
}

/// Contraction over borrowed parts, so callers can probe a candidate group
/// without cloning alignments.
pub(crate) fn contract_parts<'a, S: Scalar + 'a>(
    doc: &Document,
    sentences: &[SentenceId],
    alignments: impl IntoIterator<Item = &'a Alignment<S>>,
) -> Result<WordAlignmentGraph> {
    let mut members: Vec<SentenceId> = sentences.to_vec();
    members.sort();
    members.dedup();

    let mut offset: BTreeMap<SentenceId, usize> = BTreeMap::new();
    let mut lens: BTreeMap<SentenceId, usize> = BTreeMap::new();
    let mut total = 0usize;
    for &sid in &members {
        let sentence = doc.sentence(sid).ok_or(Error::SentenceNotInGraph(sid))?;
        offset.insert(sid, total);
        lens.insert(sid, sentence.len());
        total += sentence.len();
    }

    let mut uf = UnionFind::new(total);
    for alignment in alignments {
        for &(i, j) in &alignment.pairs {
            let (base1, len1) = match (offset.get(&alignment.s1), lens.get(&alignment.s1)) {
                (Some(&b), Some(&l)) => (b, l),
                _ => return Err(Error::SentenceNotInGraph(alignment.s1)),
            };
            let (base2, len2) = match (offset.get(&alignment.s2), lens.get(&alignment.s2)) {
                (Some(&b), Some(&l)) => (b, l),
                _ => return Err(Error::SentenceNotInGraph(alignment.s2)),
            };
            assert!(i < len1 && j < len2, "alignment position out of range");
            uf.union(base1 + i, base2 + j);
        }
    }

    contract_from_state(doc, &members, &offset, &mut uf)
}

/// Contraction from already-merged token classes: `uf` indexes each
/// member's tokens at `offset[sid] + position`. Callers that maintain the
/// union-find incrementally (the partition probe) land here directly, so
/// admitting one more sentence costs the replay, not a rebuild from every
/// pairwise alignment.
pub(crate) fn contract_from_state(
    doc: &Document,
    members: &[SentenceId],
    offset: &BTreeMap<SentenceId, usize>,
    uf: &mut UnionFind,
) -> Result<WordAlignmentGraph> {
    // one proto node per union-find root, in first-occurrence order
    let mut proto_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut protos: Vec<ProtoNode> = Vec::new();
    let mut paths: Vec<(SentenceId, Vec<usize>)> = Vec::new();
    for &sid in members {
        let sentence = doc.sentence(sid).ok_or(Error::SentenceNotInGraph(sid))?;
        let base = offset[&sid];
        let mut path = Vec::with_capacity(sentence.len());
        for (pos, token) in sentence.tokens.iter().enumerate() {
            let root = uf.find(base + pos);
            let proto = *proto_of_root.entry(root).or_insert_with(|| {
                protos.push(ProtoNode {
                    label: token.normal.clone(),
                    occurrences: Vec::new(),
                });
                protos.len() - 1
            });
            // a node visited twice by one sentence would make its path a cycle
            if protos[proto].occurrences.iter().any(|&(s, _)| s == sid) {
                return Err(Error::CycleDetected);
            }
            protos[proto].occurrences.push((sid, pos));
            path.push(proto);
        }
        paths.push((sid, path));
    }
    finalize(protos, paths)
}

/// Build the final graph from proto nodes and per-sentence proto paths:
/// add START/END, lay edges along every path, topologically sort with a
/// deterministic tie-break, and renumber nodes by rank.
fn finalize(
    protos: Vec<ProtoNode>,
    paths: Vec<(SentenceId, Vec<usize>)>,
) -> Result<WordAlignmentGraph> {
    let n = protos.len();
    let (start_v, end_v) = (n, n + 1);

    let mut edges_v: BTreeMap<(usize, usize), BTreeSet<SentenceId>> = BTreeMap::new();
    for (sid, path) in &paths {
        let hops = std::iter::once(start_v)
            .chain(path.iter().copied())
            .chain(std::iter::once(end_v));
        for (u, v) in hops.clone().zip(hops.skip(1)) {
            edges_v.entry((u, v)).or_default().insert(*sid);
        }
    }

    let mut succ: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut indegree = vec![0usize; n + 2];
    for &(u, v) in edges_v.keys() {
        succ.entry(u).or_default().push(v);
        indegree[v] += 1;
    }

    // Kahn's algorithm; ready nodes leave in (kind, earliest occurrence)
    // order so ids are stable across runs.
    let sort_key = |v: usize| -> (u8, usize, usize, usize) {
        if v == start_v {
            (0, 0, 0, v)
        } else if v == end_v {
            (2, 0, 0, v)
        } else {
            let (sid, pos) = protos[v].occurrences[0];
            (1, sid.0, pos, v)
        }
    };
    let mut ready = BinaryHeap::new();
    for v in 0..n + 2 {
        if indegree[v] == 0 {
            ready.push(Reverse(sort_key(v)));
        }
    }
    let mut order: Vec<usize> = Vec::with_capacity(n + 2);
    while let Some(Reverse((_, _, _, v))) = ready.pop() {
        order.push(v);
        for &w in succ.get(&v).into_iter().flatten() {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(Reverse(sort_key(w)));
            }
        }
    }
    if order.len() != n + 2 {
        return Err(Error::CycleDetected);
    }

    let mut rank = vec![0usize; n + 2];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    debug_assert_eq!(rank[start_v], 0);
    debug_assert_eq!(rank[end_v], n + 1);

    let mut nodes: Vec<Node> = Vec::with_capacity(n + 2);
    for (r, &v) in order.iter().enumerate() {
        let node = if v == start_v {
            Node {
                id: NodeId(r),
                kind: NodeKind::Start,
                label: String::new(),
                occurrences: Vec::new(),
            }
        } else if v == end_v {
            Node {
                id: NodeId(r),
                kind: NodeKind::End,
                label: String::new(),
                occurrences: Vec::new(),
            }
        } else {
            let mut occurrences = protos[v].occurrences.clone();
            occurrences.sort();
            Node {
                id: NodeId(r),
                kind: NodeKind::Word,
                label: protos[v].label.clone(),
                occurrences,
            }
        };
        nodes.push(node);
    }

    let edges: BTreeMap<(NodeId, NodeId), BTreeSet<SentenceId>> = edges_v
        .into_iter()
        .map(|((u, v), support)| ((NodeId(rank[u]), NodeId(rank[v])), support))
        .collect();
    let final_paths: BTreeMap<SentenceId, Vec<NodeId>> = paths
        .into_iter()
        .map(|(sid, path)| {
            let full: Vec<NodeId> = std::iter::once(NodeId(0))
                .chain(path.into_iter().map(|v| NodeId(rank[v])))
                .chain(std::iter::once(NodeId(n + 1)))
                .collect();
            (sid, full)
        })
        .collect();

    Ok(WordAlignmentGraph {
        nodes,
        edges,
        start: NodeId(0),
        end: NodeId(n + 1),
        paths: final_paths,
    })
}
