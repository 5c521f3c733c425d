fn main() {
    std::process::exit(morsefib_cli::run(std::env::args_os()));
}
