fn main() {
    std::process::exit(qma_flow::cli::main_with_args(std::env::args_os()));
}
