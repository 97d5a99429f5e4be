fn main() {
    std::process::exit(psls_cli::run(std::env::args_os()));
}
