//! End-to-end orchestration: document in, paraphrases out.

use crate::aligner::{align_all_pairs, AlignResources, Alignment, AlignerConfig};
use crate::compat::{partition_into_groups, CompatibleGroup, PartitionConfig};
use crate::corpus::{Document, SentenceId};
use crate::error::Result;
use crate::graph::{contract_group, WordAlignmentGraph};
use crate::mine::{
    detect_optional_phrases, enumerate_parallel_paths, essential_form, filter_candidates,
    CandidateSet, MineConfig, OptionalPhrase, ParaphrasePair,
};
use crate::{Scalar, Score};

/// Everything the pipeline needs to know, stage by stage.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig<S = Score> {
    pub aligner: AlignerConfig<S>,
    pub partition: PartitionConfig,
    pub mine: MineConfig,
    /// Drop punctuation nodes from each graph before mining.
    pub strip_punct: bool,
}

impl<S: Scalar> Default for PipelineConfig<S> {
    fn default() -> Self {
        PipelineConfig {
            aligner: AlignerConfig::default(),
            partition: PartitionConfig::default(),
            mine: MineConfig::default(),
            strip_punct: false,
        }
    }
}

/// Mining output for one compatible group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupResult {
    pub graph: WordAlignmentGraph,
    pub candidate_sets: Vec<CandidateSet>,
    pub pairs: Vec<ParaphrasePair>,
    pub optionals: Vec<OptionalPhrase>,
    /// Essential form of each member sentence, in member order.
    pub essential: Vec<(SentenceId, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput<S = Score> {
    pub alignments: Vec<Alignment<S>>,
    pub groups: Vec<CompatibleGroup<S>>,
    /// One result per group, in group order.
    pub results: Vec<GroupResult>,
}

impl<S> PipelineOutput<S> {
    /// All mined pairs across groups, in group order.
    pub fn pairs(&self) -> impl Iterator<Item = &ParaphrasePair> {
        self.results.iter().flat_map(|r| r.pairs.iter())
    }

    /// All optional phrases across groups, in group order.
    pub fn optionals(&self) -> impl Iterator<Item = &OptionalPhrase> {
        self.results.iter().flat_map(|r| r.optionals.iter())
    }

    /// Essential forms of all sentences, in sentence order.
    pub fn essential_in_order(&self) -> Vec<(SentenceId, &str)> {
        let mut out: Vec<(SentenceId, &str)> = self
            .results
            .iter()
            .flat_map(|r| r.essential.iter().map(|(sid, t)| (*sid, t.as_str())))
            .collect();
        out.sort_by_key(|&(sid, _)| sid);
        out
    }
}

/// Run the whole pipeline: align all sentence pairs, partition into
/// compatible groups, contract each group into its graph (optionally
/// punctuation-stripped), and mine parallel paths, paraphrase pairs,
/// optional phrases, and essential forms.
pub fn run<S: Scalar>(
    doc: &Document,
    cfg: &PipelineConfig<S>,
    res: &AlignResources<'_, S>,
) -> Result<PipelineOutput<S>> {
    cfg.mine.validate()?;
    let alignments = align_all_pairs(doc, &cfg.aligner, res)?;
    let groups = partition_into_groups(doc, &alignments, &cfg.partition);
    let mut results = Vec::with_capacity(groups.len());
    for group in &groups {
        let mut graph = contract_group(doc, group)?;
        if cfg.strip_punct {
            graph = graph.strip_punct();
        }
        let candidate_sets = enumerate_parallel_paths(&graph, &cfg.mine);
        let pairs = filter_candidates(doc, &graph, &candidate_sets, &cfg.mine);
        let optionals = detect_optional_phrases(&graph, &cfg.mine);
        let essential = group
            .sentences
            .iter()
            .map(|&sid| essential_form(&graph, &optionals, sid).map(|text| (sid, text)))
            .collect::<Result<Vec<_>>>()?;
        results.push(GroupResult {
            graph,
            candidate_sets,
            pairs,
            optionals,
            essential,
        });
    }
    Ok(PipelineOutput {
        alignments,
        groups,
        results,
    })
}
