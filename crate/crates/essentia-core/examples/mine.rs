//! Minimal library walkthrough: load a cluster, run the pipeline, print
//! the mined pairs.
//!
//! ```console
//! $ cargo run -p essentia-core --example mine -- cluster.txt
//! ```

use std::path::Path;

use essentia_core::{pipeline, AlignResources, PipelineConfig, Result, Score};

fn mine(path: &Path) -> Result<()> {
    let doc = essentia_core::load_document(path, &Default::default())?;
    let cfg = PipelineConfig::<Score>::default();
    let out = pipeline::run(&doc, &cfg, &AlignResources::default())?;
    for pair in out.pairs() {
        println!("{} <-> {}", pair.phrase_a, pair.phrase_b);
    }
    Ok(())
}

fn main() -> Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .expect("usage: mine <corpus file>");
    mine(Path::new(&path))
}
