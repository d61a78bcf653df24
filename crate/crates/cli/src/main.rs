fn main() {
    std::process::exit(asc_cli::run(std::env::args_os()));
}
