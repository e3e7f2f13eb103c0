fn main() {
    std::process::exit(svdd_cli::main_with_args(std::env::args_os()));
}
