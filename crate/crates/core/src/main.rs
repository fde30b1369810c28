fn main() {
    std::process::exit(scattering::cli::main_with_args(std::env::args_os()));
}
