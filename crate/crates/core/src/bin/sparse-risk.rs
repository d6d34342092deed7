fn main() {
    std::process::exit(sparse_risk::cli::main_with_args(std::env::args_os()));
}
