fn main() {
    std::process::exit(taildom::cli::main_with_args(std::env::args_os()));
}
