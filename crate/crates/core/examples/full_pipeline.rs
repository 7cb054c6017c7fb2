// The whole flow into a directory, then a look at the manifest.

use std::error::Error;

use persona_miner::pipeline::{run_pipeline, PipelineConfig};
use persona_miner::synth::{generate_corpus, SynthSpec};
use persona_miner::trace::serialize_corpus;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let input = dir.path().join("corpus.json");
    std::fs::write(&input, serialize_corpus(&generate_corpus(&SynthSpec::default(), 40, 5)?.corpus))?;

    let run = run_pipeline(&PipelineConfig {
        input,
        output_dir: dir.path().join("bundle"),
        ..PipelineConfig::default()
    })?;
    for stage in &run.manifest.stages {
        for a in &stage.outputs {
            println!("{:<13} {:<20} {:>8} B  {}", stage.stage.name(), a.file, a.bytes, &a.sha256[..12]);
        }
    }
    println!();
    print!("{}", run.report.render_text());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
