fn main() {
    std::process::exit(rmbayes::cli::main_with_args(std::env::args_os()));
}
