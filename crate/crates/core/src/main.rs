fn main() {
    std::process::exit(rodspec::cli::run_from(std::env::args_os()));
}
