fn main() {
    std::process::exit(counting_bridges::cli::main_with_args(std::env::args_os()));
}
