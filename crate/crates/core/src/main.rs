fn main() {
    std::process::exit(etaforge::cli::run(std::env::args_os()));
}
