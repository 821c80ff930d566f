//! Mining domain-specific paraphrases from small clusters of same-intent
//! sentences.
//!
//! Given a handful of sentences that all express the same intent (an intent
//! cluster), this crate aligns them word-by-word, merges aligned words into
//! a word-alignment graph — a DAG in which every input sentence is a path
//! from a shared START node to a shared END node — and then reads paraphrase
//! candidates off the graph: parallel paths between the same pair of nodes
//! are candidate paraphrases, and a path that bypasses a directly connected
//! node pair marks an optional phrase.
//!
//! The pipeline stages live in their own modules and compose via
//! [`pipeline::run`]:
//!
//! - [`corpus`]: tokenization and NUM/ORG masking
//! - [`aligner`]: greedy weighted word alignment of sentence pairs
//! - [`compat`]: compatibility checks and partitioning of alignments into
//!   groups that merge cleanly
//! - [`graph`]: word-alignment graph construction and serialization
//! - [`mine`]: candidate extraction, verb-phrase filtering, optional
//!   phrases, sentence generation, essential forms
//! - [`eval`]: coverage and precision against an external paraphrase
//!   database or human labels
//!
//! Scores are generic over the floating-point scalar via [`Scalar`];
//! [`Score`] (`f64`) is the default used throughout the CLI.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};

pub mod aligner;
pub mod compat;
pub mod corpus;
mod dsu;
pub mod error;
pub mod eval;
pub mod graph;
pub mod lexicon;
pub mod mine;
pub mod pipeline;

pub use aligner::{
    align_all_pairs, align_pair, token_similarity, Alignment, AlignerConfig, AlignResources,
    EmbeddingTable, SynonymLexicon,
};
pub use compat::{
    check_alignment_set, check_injectivity, check_monotonicity, check_transitivity,
    partition_into_groups, CompatibleGroup, PartitionConfig, Violation, ViolationKind,
};
pub use corpus::{
    load_corpus, load_document, load_tagged, mask_special, tokenize, Document, Gazetteer,
    MaskConfig, MaskTag, PosTag, Sentence, SentenceId, Token,
};
pub use error::{Error, Result};
pub use eval::{
    db_coverage, load_db_file, load_labels, load_labels_file, load_paraphrase_db,
    precision_report, CoverageReport, LabeledPairs, ParaphraseDb, PrecisionReport,
};
pub use graph::{assemble_graph, contract_group, Node, NodeId, NodeKind, WordAlignmentGraph};
pub use mine::{
    detect_optional_phrases, enumerate_parallel_paths, essential_form, filter_candidates,
    generate_sentences, CandidateSet, FilterMode, MineConfig, OptionalPhrase, PairCategory,
    ParaphrasePair, PhrasePath,
};
pub use pipeline::{GroupResult, PipelineConfig, PipelineOutput};

/// Floating-point scalar the alignment scores are computed in.
///
/// Implemented for `f32` and `f64`; the crate-level [`Score`] alias picks
/// `f64` as the default precision.
pub trait Scalar: Float + FromPrimitive + Debug + Send + Sync + 'static {
    /// Lossy conversion from `f64` (used to scale configured weights).
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to any float scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Default scalar for similarity scores.
pub type Score = f64;
