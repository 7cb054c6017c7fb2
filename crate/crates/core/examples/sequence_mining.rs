// GSP over a handful of paths, then maximal patterns, archetypes and
// branches.

use std::error::Error;

use persona_miner::seqmine::{gsp_mine, maximal_patterns, Mode, PersonaConfig, PersonaReport, SequenceDb};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let db = SequenceDb::from_sequences(vec![vec![5, 1, 3, 11, 9], vec![5, 1, 3, 11, 4], vec![0, 1, 3, 11]])?;
    for mode in [Mode::Gapped, Mode::Contiguous] {
        let frequent = gsp_mine(&db, 3, mode);
        let shown: Vec<String> = frequent.iter().map(|p| format!("{:?}", p.items)).collect();
        println!("{mode}: support>=3 -> {}", shown.join(" "));
        let maximal = maximal_patterns(&frequent, mode);
        println!("  maximal: {:?}", maximal.iter().map(|p| &p.items).collect::<Vec<_>>());
    }

    let mut paths = Vec::new();
    for _ in 0..6 {
        paths.push(vec![0, 8, 3, 7]);
        paths.push(vec![0, 8, 6]);
    }
    paths.extend([vec![0, 8, 10, 3, 7], vec![0, 8, 10, 6], vec![0, 8, 10]]);
    let db = SequenceDb::from_sequences(paths)?;
    let report = PersonaReport::build(
        &db,
        &PersonaConfig {
            top_k: 2,
            ..PersonaConfig::default()
        },
    )?;
    print!("\n{}", report.render_text());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
