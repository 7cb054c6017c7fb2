// Every clustering algorithm on the same 2-D embedding, scored with the
// three internal indices.

use std::error::Error;

use persona_miner::clustering::{fit, Algorithm, ClusterConfig, DbscanParams, FitParams};
use persona_miner::features::{encode_corpus, EncoderKind};
use persona_miner::model::Reduction;
use persona_miner::synth::{generate_corpus, SynthSpec};
use persona_miner::validation::IndexReport;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = generate_corpus(&SynthSpec::default(), 30, 1)?;
    let (_, x) = Reduction::fit(&encode_corpus(&g.corpus, EncoderKind::Tiles)?, 2)?;

    println!("{:<15} {:>3} {:>6} {:>10} {:>8} {:>12}", "algorithm", "k", "noise", "silhouette", "DB", "CH");
    for algorithm in Algorithm::ALL {
        let params = FitParams {
            algorithm,
            config: ClusterConfig::with_k(12),
            dbscan: DbscanParams { eps: 0.3, min_pts: 5 },
        };
        let model = fit(&x, &params)?;
        match IndexReport::compute(&x, &model.labels) {
            Ok(r) => println!(
                "{:<15} {:>3} {:>6} {:>10.4} {:>8.4} {:>12.1}",
                algorithm.to_string(),
                model.n_clusters,
                model.noise_count(),
                r.silhouette,
                r.davies_bouldin,
                r.calinski_harabasz
            ),
            Err(e) => println!("{:<15} {:>3} {:>6} {e}", algorithm.to_string(), model.n_clusters, model.noise_count()),
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
