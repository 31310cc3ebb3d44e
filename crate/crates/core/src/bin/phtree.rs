fn main() {
    std::process::exit(phtree::cli::main_with_args(std::env::args_os()));
}
