fn main() {
    std::process::exit(hegy_cli::main_with_args(std::env::args_os()));
}
