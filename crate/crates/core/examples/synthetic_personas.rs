// Generates a corpus from the four default personas, clusters it and checks
// how many planted paths come back out of the mined patterns.

use std::error::Error;

use persona_miner::clustering::{kmeans_fit, ClusterConfig};
use persona_miner::features::{encode_corpus, EncoderKind};
use persona_miner::model::{Reduction, StyleModel};
use persona_miner::seqmine::{PersonaConfig, PersonaReport, SequenceDb};
use persona_miner::synth::{default_personas, generate_corpus, score_recovery, SynthSpec};
use persona_miner::trajectory::{assign_clusters, unique_trajectories, FilterConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let spec = SynthSpec::default();
    let g = generate_corpus(&spec, 60, 42)?;
    println!("{} sessions, {} steps", g.corpus.sessions().len(), g.corpus.total_steps());

    let table = encode_corpus(&g.corpus, EncoderKind::Tiles)?;
    let (reduction, x) = Reduction::fit(&table, 2)?;
    let clusters = kmeans_fit(&x, &ClusterConfig::with_k(12))?;
    let model = StyleModel::new(reduction, clusters, x)?;

    let trajs = g
        .corpus
        .sessions()
        .iter()
        .map(|s| assign_clusters(s, &model))
        .collect::<Result<Vec<_>, _>>()?;
    let unique = unique_trajectories(&trajs, &FilterConfig::default());
    let report = PersonaReport::build(&SequenceDb::from_unique_paths(&unique)?, &PersonaConfig::default())?;

    let predicted: Vec<usize> = trajs.iter().flat_map(|t| t.cluster_ids.iter().copied()).collect();
    let planted: Vec<Vec<usize>> = default_personas().into_iter().map(|p| p.persona.path).collect();
    let r = score_recovery(&predicted, &g.planted_styles_flat(), 12, 12, &report.maximal, &planted, 6);
    for (path, ok) in planted.iter().zip(&r.recovered) {
        println!("{path:?}: {}", if *ok { "recovered" } else { "missed" });
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
