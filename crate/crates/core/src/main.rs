fn main() {
    std::process::exit(persona_miner::cli::main());
}
