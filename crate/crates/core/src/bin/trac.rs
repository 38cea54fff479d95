fn main() {
    std::process::exit(trac::cli::run_cli(std::env::args_os()));
}
