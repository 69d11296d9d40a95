fn main() {
    std::process::exit(cramer::cli::run(std::env::args_os()));
}
