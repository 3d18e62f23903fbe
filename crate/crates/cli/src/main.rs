fn main() {
    std::process::exit(epr_cli::run(std::env::args_os()));
}
