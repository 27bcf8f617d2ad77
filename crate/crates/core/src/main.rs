fn main() {
    std::process::exit(cascade_pricer::cli::main());
}
