fn main() {
    std::process::exit(nks::cli::dispatch(std::env::args_os()));
}
