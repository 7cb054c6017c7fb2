// Rendering the two SVG figures without running the whole pipeline.

use std::error::Error;

use persona_miner::matrix::Matrix;
use persona_miner::pipeline::svg::{render_cluster_scatter, render_path_diagram};
use persona_miner::seqmine::{PersonaConfig, PersonaReport, SequenceDb};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let points = Matrix::from_rows(&[[0.0, 0.0], [0.2, 0.1], [3.0, 3.2], [3.1, 2.9], [6.0, 0.5]]).ok_or("ragged")?;
    let scatter = render_cluster_scatter(&points, &[0, 0, 1, 1, -1])?;

    let mut paths = vec![vec![0, 8, 3, 7]; 5];
    paths.extend(vec![vec![0, 8, 6]; 4]);
    paths.extend(vec![vec![0, 5, 6]; 3]);
    let report = PersonaReport::build(&SequenceDb::from_sequences(paths)?, &PersonaConfig::default())?;
    let diagram = render_path_diagram(&report);

    let dir = tempfile::tempdir()?;
    for (name, svg) in [("scatter.svg", &scatter), ("paths.svg", &diagram)] {
        std::fs::write(dir.path().join(name), svg)?;
        println!("{name}: {} bytes, {} lines", svg.len(), svg.matches("<line").count());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
