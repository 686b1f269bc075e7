fn main() {
    std::process::exit(tvstair::cli::run(std::env::args_os()));
}
