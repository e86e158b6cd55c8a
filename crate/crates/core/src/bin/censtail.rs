fn main() {
    std::process::exit(censtail::cli::run(std::env::args_os()));
}
