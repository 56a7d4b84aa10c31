fn main() {
    std::process::exit(charflow::cli::main_with_args(std::env::args_os()));
}
