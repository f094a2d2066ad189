fn main() {
    std::process::exit(orbitscope::cli::main_with_args(std::env::args_os()));
}
