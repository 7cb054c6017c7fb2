// The four feature encodings of a room.

use std::error::Error;

use persona_miner::features::{encode, encode_dimensions, encode_inner_content, EncoderKind};
use persona_miner::synth::default_templates;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let templates = default_templates();
    let room = &templates.iter().find(|t| t.style_id == 7).ok_or("no style 7")?.base;

    for kind in EncoderKind::ALL {
        let v = encode(room, kind);
        let head: Vec<String> = v.values.iter().take(6).map(|x| format!("{x:.3}")).collect();
        println!("{:<12} {:>3} columns  [{} ...]", kind.label(), kind.dim(), head.join(", "));
    }

    let d = encode_dimensions(room);
    println!("dimensions: {:?}", d);
    let inner = encode_inner_content(room);
    println!("inner content: {:?}", inner.to_vec());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
