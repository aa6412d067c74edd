fn main() {
    std::process::exit(drlab::cli::run_from(std::env::args_os()));
}
