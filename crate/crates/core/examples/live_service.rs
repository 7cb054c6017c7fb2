// Replaying a session against a model bundle, as the editor would through
// the HTTP API. `persona-miner serve --model-dir <bundle>` exposes the same
// service over HTTP.

use std::error::Error;

use persona_miner::pipeline::{run_pipeline, PipelineConfig};
use persona_miner::service::LiveService;
use persona_miner::synth::{generate_corpus, SynthSpec};
use persona_miner::trace::serialize_corpus;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let g = generate_corpus(&SynthSpec::default(), 40, 9)?;
    let input = dir.path().join("corpus.json");
    std::fs::write(&input, serialize_corpus(&g.corpus))?;
    let bundle = dir.path().join("bundle");
    run_pipeline(&PipelineConfig {
        input,
        output_dir: bundle.clone(),
        ..PipelineConfig::default()
    })?;

    let svc = LiveService::load(&bundle)?;
    let id = svc.create_session(None)?;
    let session = &g.corpus.sessions()[0];
    let mut last_path = Vec::new();
    for grid in session.grids() {
        let c = svc.classify_step(&id, grid)?;
        if c.path != last_path {
            let next: Vec<String> = c.predicted_next.iter().take(3).map(|p| format!("{}({})", p.cluster, p.weight)).collect();
            println!("step {:>3}: cluster {:>2}, path {:?}, next {}", c.step, c.cluster, c.path, next.join(" "));
            last_path = c.path;
        }
    }
    let card = svc.model_card();
    println!("model: {} clusters over {} rows, {} personas", card.n_clusters, card.training_rows, card.personas.len());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
