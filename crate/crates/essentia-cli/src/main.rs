//! Command-line front end for the paraphrase mining pipeline.
//!
//! Subcommands: `mine` writes every artifact of a full run, `graph`
//! exports the word-alignment graphs, `clean` prints essential sentence
//! forms, and `eval` scores mined pairs against a paraphrase database
//! and/or human labels. All artifacts are deterministic: the same inputs
//! and flags produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use essentia_core::{
    db_coverage, generate_sentences, load_db_file, load_document, load_labels_file, pipeline,
    precision_report, AlignResources, Document, EmbeddingTable, Error, FilterMode, Gazetteer,
    MaskConfig, PipelineConfig, PipelineOutput, Result, Score, SynonymLexicon,
};

#[derive(Parser)]
#[command(
    name = "essentia",
    version,
    about = "Mine domain-specific paraphrases from clusters of same-intent sentences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write all artifacts to a directory
    Mine(MineArgs),
    /// Build the word-alignment graphs and export them as JSON and DOT
    Graph(GraphArgs),
    /// Reduce each sentence to its essential form
    Clean(CleanArgs),
    /// Evaluate mined pairs against a paraphrase database and/or labels
    Eval(EvalArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Input corpus: one sentence per line ('#' comments allowed), or a
    /// pre-tagged .tagged file with surface<TAB>pos<TAB>mask lines
    #[arg(long)]
    input: PathBuf,

    /// Minimum blended similarity for aligning two tokens
    #[arg(long, default_value_t = 0.6)]
    threshold: f64,

    /// Word-embedding table: `word v1 .. vd` per line
    #[arg(long)]
    embeddings: Option<PathBuf>,

    /// Synonym pairs: `word<TAB>word` per line
    #[arg(long)]
    synonyms: Option<PathBuf>,

    /// Entity gazetteer: one phrase per line, masked as ORG
    #[arg(long)]
    gazetteer: Option<PathBuf>,

    /// Longest path interior considered when mining
    #[arg(long, default_value_t = 6)]
    max_internal_len: usize,

    /// Longest phrase (in tokens) the verb filter accepts
    #[arg(long, default_value_t = 3)]
    max_phrase_len: usize,

    /// Which candidate pairs to keep
    #[arg(long, value_enum, default_value_t = FilterModeArg::Verb3)]
    filter_mode: FilterModeArg,

    /// Remove punctuation nodes from each graph before mining
    #[arg(long)]
    strip_punct: bool,

    /// Allow token pairs that cross instead of requiring left-to-right
    /// order within each alignment
    #[arg(long)]
    no_monotone_align: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FilterModeArg {
    /// Verb-initial phrases of bounded length on both sides
    Verb3,
    /// Every parallel-path pair
    All,
}

#[derive(Args)]
struct MineArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Directory for pairs.jsonl, optionals.jsonl, groups.json,
    /// graph.json, essential.txt, generated.txt, and run.json
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Directory for graph.json and graph.dot
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CleanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Write essential.txt here instead of printing to stdout
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Directory for coverage.json / precision.json
    #[arg(long)]
    out_dir: PathBuf,
    /// Paraphrase database: `|||`-separated or two-column TSV
    #[arg(long)]
    db: Option<PathBuf>,
    /// Human judgments: `phrase<TAB>phrase<TAB>label` TSV
    #[arg(long)]
    labels: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::CycleDetected) => {
            eprintln!("error: {}", Error::CycleDetected);
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Mine(args) => cmd_mine(args),
        Command::Graph(args) => cmd_graph(args),
        Command::Clean(args) => cmd_clean(args),
        Command::Eval(args) => cmd_eval(args),
    }
}

/// Loaded inputs shared by every subcommand.
struct Session {
    doc: Document,
    cfg: PipelineConfig<Score>,
    embeddings: Option<EmbeddingTable<Score>>,
    synonyms: Option<SynonymLexicon>,
}

impl Session {
    fn resources(&self) -> AlignResources<'_, Score> {
        AlignResources {
            embeddings: self.embeddings.as_ref(),
            synonyms: self.synonyms.as_ref(),
        }
    }

    fn run(&self) -> Result<PipelineOutput<Score>> {
        pipeline::run(&self.doc, &self.cfg, &self.resources())
    }
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "not a readable file: {}",
            path.display()
        )))
    }
}

fn load_session(common: &CommonArgs) -> Result<Session> {
    require_file(&common.input)?;
    let mut mask = MaskConfig::default();
    if let Some(path) = &common.gazetteer {
        require_file(path)?;
        mask.gazetteer = Gazetteer::load(path)?;
    }
    let doc = load_document(&common.input, &mask)?;

    let mut cfg: PipelineConfig<Score> = PipelineConfig::default();
    cfg.aligner.threshold = common.threshold;
    cfg.aligner.enforce_monotone = !common.no_monotone_align;
    cfg.mine.max_internal_len = common.max_internal_len;
    cfg.mine.max_phrase_len = common.max_phrase_len;
    cfg.mine.filter_mode = match common.filter_mode {
        FilterModeArg::Verb3 => FilterMode::VerbPhrase,
        FilterModeArg::All => FilterMode::All,
    };
    cfg.strip_punct = common.strip_punct;
    cfg.aligner.validate()?;
    cfg.mine.validate()?;

    let embeddings = match &common.embeddings {
        Some(path) => {
            require_file(path)?;
            Some(EmbeddingTable::load(path)?)
        }
        None => None,
    };
    let synonyms = match &common.synonyms {
        Some(path) => {
            require_file(path)?;
            Some(SynonymLexicon::load(path)?)
        }
        None => None,
    };
    Ok(Session {
        doc,
        cfg,
        embeddings,
        synonyms,
    })
}

fn write_text(dir: &Path, name: &str, content: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), content)?;
    Ok(())
}

fn pairs_jsonl(session: &Session, out: &PipelineOutput<Score>) -> String {
    let mut lines = String::new();
    for (gi, result) in out.results.iter().enumerate() {
        for p in &result.pairs {
            let value = json!({
                "phrase_a": p.phrase_a,
                "phrase_b": p.phrase_b,
                "category": p.category.as_str(),
                "domain": session.doc.label,
                "group": gi,
                "anchors": [p.from, p.to],
                "support_a": p.support_a,
                "support_b": p.support_b,
            });
            lines.push_str(&value.to_string());
            lines.push('\n');
        }
    }
    lines
}

fn optionals_jsonl(session: &Session, out: &PipelineOutput<Score>) -> String {
    let mut lines = String::new();
    for (gi, result) in out.results.iter().enumerate() {
        for o in &result.optionals {
            let value = json!({
                "phrase": o.phrase,
                "domain": session.doc.label,
                "group": gi,
                "anchors": [o.from, o.to],
                "support": o.support,
                "bypass_support": o.bypass_support,
            });
            lines.push_str(&value.to_string());
            lines.push('\n');
        }
    }
    lines
}

fn groups_json(out: &PipelineOutput<Score>) -> String {
    let groups: Vec<Vec<usize>> = out
        .groups
        .iter()
        .map(|g| g.sentences.iter().map(|s| s.0).collect())
        .collect();
    let mut text = serde_json::to_string_pretty(&json!({ "groups": groups }))
        .expect("groups serialize");
    text.push('\n');
    text
}

fn graph_json(out: &PipelineOutput<Score>) -> String {
    let graphs: Vec<serde_json::Value> = out
        .results
        .iter()
        .map(|r| r.graph.to_json_value())
        .collect();
    let mut text = serde_json::to_string_pretty(&graphs).expect("graphs serialize");
    text.push('\n');
    text
}

fn essential_text(out: &PipelineOutput<Score>) -> String {
    let mut text = String::new();
    for (_, form) in out.essential_in_order() {
        text.push_str(form);
        text.push('\n');
    }
    text
}

/// Cap on sentences spelled out by `mine` per graph; combinatorially rich
/// graphs are truncated rather than allowed to flood the artifact.
const GENERATION_LIMIT: usize = 10_000;

fn generated_text(out: &PipelineOutput<Score>) -> String {
    let mut text = String::new();
    for result in &out.results {
        for sentence in generate_sentences(&result.graph, GENERATION_LIMIT) {
            text.push_str(&sentence);
            text.push('\n');
        }
    }
    text
}

fn run_json(session: &Session, out: &PipelineOutput<Score>, wall_ms: u128) -> String {
    let filter = match session.cfg.mine.filter_mode {
        FilterMode::VerbPhrase => "verb3",
        FilterMode::All => "all",
    };
    let value = json!({
        "domain": session.doc.label,
        "config": {
            "threshold": session.cfg.aligner.threshold,
            "monotone_align": session.cfg.aligner.enforce_monotone,
            "max_internal_len": session.cfg.mine.max_internal_len,
            "max_phrase_len": session.cfg.mine.max_phrase_len,
            "filter_mode": filter,
            "strip_punct": session.cfg.strip_punct,
        },
        "counts": {
            "sentences": session.doc.sentences.len(),
            "alignments": out.alignments.len(),
            "groups": out.groups.len(),
            "nodes": out.results.iter().map(|r| r.graph.node_count()).sum::<usize>(),
            "edges": out.results.iter().map(|r| r.graph.edge_count()).sum::<usize>(),
            "candidate_sets": out.results.iter().map(|r| r.candidate_sets.len()).sum::<usize>(),
            "pairs": out.pairs().count(),
            "optionals": out.optionals().count(),
        },
        "wall_ms": wall_ms,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("run info serializes");
    text.push('\n');
    text
}

fn cmd_mine(args: MineArgs) -> Result<()> {
    let started = Instant::now();
    let session = load_session(&args.common)?;
    let out = session.run()?;
    let wall_ms = started.elapsed().as_millis();

    write_text(&args.out_dir, "pairs.jsonl", &pairs_jsonl(&session, &out))?;
    write_text(&args.out_dir, "optionals.jsonl", &optionals_jsonl(&session, &out))?;
    write_text(&args.out_dir, "groups.json", &groups_json(&out))?;
    write_text(&args.out_dir, "graph.json", &graph_json(&out))?;
    write_text(&args.out_dir, "essential.txt", &essential_text(&out))?;
    write_text(&args.out_dir, "generated.txt", &generated_text(&out))?;
    write_text(&args.out_dir, "run.json", &run_json(&session, &out, wall_ms))?;

    println!(
        "mined {} pairs and {} optional phrases from {} sentences in {} groups",
        out.pairs().count(),
        out.optionals().count(),
        session.doc.sentences.len(),
        out.groups.len()
    );
    Ok(())
}

fn cmd_graph(args: GraphArgs) -> Result<()> {
    let session = load_session(&args.common)?;
    let out = session.run()?;
    let mut dot = String::new();
    for (gi, result) in out.results.iter().enumerate() {
        dot.push_str(&result.graph.to_dot().replacen(
            "digraph wag {",
            &format!("digraph wag_{gi} {{"),
            1,
        ));
    }
    write_text(&args.out_dir, "graph.json", &graph_json(&out))?;
    write_text(&args.out_dir, "graph.dot", &dot)?;
    println!(
        "wrote {} graphs ({} nodes total)",
        out.results.len(),
        out.results.iter().map(|r| r.graph.node_count()).sum::<usize>()
    );
    Ok(())
}

fn cmd_clean(args: CleanArgs) -> Result<()> {
    let session = load_session(&args.common)?;
    let out = session.run()?;
    let text = essential_text(&out);
    match &args.out_dir {
        Some(dir) => write_text(dir, "essential.txt", &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    if args.db.is_none() && args.labels.is_none() {
        return Err(Error::InvalidConfig(
            "pass --db and/or --labels to evaluate against".to_string(),
        ));
    }
    let session = load_session(&args.common)?;
    let out = session.run()?;
    let mined: Vec<_> = out.pairs().cloned().collect();

    if let Some(path) = &args.db {
        require_file(path)?;
        let db = load_db_file(path)?;
        let report = db_coverage(&mined, &db);
        let value = json!({
            "db": report.db_source,
            "total": report.total,
            "covered": report.covered,
            "fraction": report.fraction,
            "covered_pairs": report.covered_pairs,
        });
        let mut text = serde_json::to_string_pretty(&value).expect("coverage serializes");
        text.push('\n');
        write_text(&args.out_dir, "coverage.json", &text)?;
        println!(
            "coverage: {}/{} mined pairs found in {} ({:.2}%)",
            report.covered,
            report.total,
            report.db_source,
            report.fraction * 100.0
        );
    }

    if let Some(path) = &args.labels {
        require_file(path)?;
        let labels = load_labels_file(path)?;
        let report = precision_report(&mined, &labels);
        let value = json!({
            "judged": report.judged,
            "valid": report.valid,
            "unjudged": report.unjudged,
            "precision": report.precision,
        });
        let mut text = serde_json::to_string_pretty(&value).expect("precision serializes");
        text.push('\n');
        write_text(&args.out_dir, "precision.json", &text)?;
        match report.precision {
            Some(p) => println!(
                "precision: {}/{} judged pairs valid ({:.2}%), {} unjudged",
                report.valid,
                report.judged,
                p * 100.0,
                report.unjudged
            ),
            None => println!(
                "precision: no mined pair was judged ({} unjudged)",
                report.unjudged
            ),
        }
    }
    Ok(())
}
