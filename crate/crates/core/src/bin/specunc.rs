fn main() {
    std::process::exit(spectral_uncertainty::cli::main_with_args(std::env::args_os()));
}
