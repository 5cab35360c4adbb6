fn main() {
    std::process::exit(semirandom_lab::cli::main_with_args(std::env::args_os()));
}
