fn main() {
    std::process::exit(young_cli::run(std::env::args_os()));
}
