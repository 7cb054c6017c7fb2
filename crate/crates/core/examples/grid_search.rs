// A small setup grid, ranked by Davies-Bouldin, printed as a table and CSV.

use std::error::Error;

use persona_miner::clustering::Algorithm;
use persona_miner::features::EncoderKind;
use persona_miner::synth::{generate_corpus, SynthSpec};
use persona_miner::validation::{grid_search, paper_setups, render_table, write_csv, GridSearchOptions, IndexKind};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = generate_corpus(&SynthSpec::default(), 20, 2)?;
    let setups = paper_setups(
        &[Algorithm::KMeans, Algorithm::AggloAverage],
        &[EncoderKind::Tiles, EncoderKind::Dimensions],
        &[4, 12],
    );
    let options = GridSearchOptions {
        primary: IndexKind::DaviesBouldin,
        ..GridSearchOptions::default()
    };
    let rows = grid_search(&g.corpus, &setups, &options);
    print!("{}", render_table(&rows));

    let mut csv = Vec::new();
    write_csv(&rows, &mut csv)?;
    println!("\n{}", String::from_utf8(csv)?.lines().next().unwrap_or_default());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
