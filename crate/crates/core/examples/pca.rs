// Standardise-and-project: fitting the reduction on a synthetic corpus and
// projecting a new room with it.

use std::error::Error;

use persona_miner::features::{encode_corpus, EncoderKind};
use persona_miner::model::Reduction;
use persona_miner::synth::{default_templates, generate_corpus, SynthSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = generate_corpus(&SynthSpec::default(), 24, 7)?;
    for kind in [EncoderKind::Tiles, EncoderKind::Combined] {
        let table = encode_corpus(&g.corpus, kind)?;
        let (reduction, embedding) = Reduction::fit(&table, 2)?;
        let total: f64 = reduction.pca.explained_variance.iter().sum();
        println!(
            "{:<9} {} rows -> {}x{}, standardised: {}, variance kept by 2 PCs: {total:.3}",
            kind.label(),
            table.matrix.rows(),
            embedding.rows(),
            embedding.cols(),
            reduction.standardizer.is_some()
        );
        for t in default_templates().iter().take(3) {
            let p = reduction.project(&t.base);
            println!("  style {:>2} ({}) at ({:+.2}, {:+.2})", t.style_id, t.name, p[0], p[1]);
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
