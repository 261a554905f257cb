fn main() {
    std::process::exit(lorentz_minimal::app::cli::main_with_args(std::env::args_os()));
}
