fn main() {
    std::process::exit(constrained_qaoa::cli::main());
}
