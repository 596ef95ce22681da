fn main() {
    std::process::exit(mixtri_cli::run(std::env::args_os()));
}
