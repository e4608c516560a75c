fn main() {
    std::process::exit(pev_mzi::cli::main_with_args(std::env::args_os()));
}
