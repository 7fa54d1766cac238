fn main() {
    std::process::exit(mutsel::cli::main());
}
