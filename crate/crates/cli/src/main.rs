fn main() {
    std::process::exit(dynrefl_cli::run(std::env::args().collect()));
}
