fn main() {
    std::process::exit(vhodge::cli::main_with_args(std::env::args_os()));
}
