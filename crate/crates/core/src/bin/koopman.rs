fn main() {
    std::process::exit(koopman::cli::main_exit());
}
