fn main() {
    std::process::exit(reciprocal_core::cli::run(std::env::args_os()));
}
