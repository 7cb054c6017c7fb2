// Building, validating and serialising design sessions.
//
// ```text
// cargo run --example trace_model
// ```

use std::error::Error;

use persona_miner::trace::{diff_steps, parse_corpus, serialize_corpus, Corpus, DesignSession, RoomGrid, TileType};

const ROOM: &str = "
    WWWWWWDWWWWWW
    WFFFFFFFFFFFW
    WFFFFFFFFFFFW
    DFFFFFFFFFFFD
    WFFFFFFFFFFFW
    WFFFFFFFFFFFW
    WWWWWWDWWWWWW";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let start = RoomGrid::from_picture(ROOM).map_err(|v| format!("{v:?}"))?;
    let mut next = start.clone();
    next.set(3, 2, TileType::Enemy);
    next.set(9, 4, TileType::Treasure);

    println!("wire form: {}", next.to_code_string());
    for c in diff_steps(&start, &next) {
        println!("cell {:>2}: {:?} -> {:?}", c.cell, c.old, c.new);
    }

    // rejected input reports every violation at once
    match RoomGrid::parse("FFQ") {
        Ok(_) => unreachable!(),
        Err(v) => println!("bad grid: {}", v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")),
    }

    let session = DesignSession::new("demo-1", "p01", vec![start, next])?;
    let corpus = Corpus::new(vec![session])?;
    let bytes = serialize_corpus(&corpus);
    let back = parse_corpus(&bytes)?;
    assert_eq!(back, corpus);
    println!("{} session(s), {} steps, {} bytes of JSON", back.sessions().len(), back.total_steps(), bytes.len());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
