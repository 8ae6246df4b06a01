fn main() {
    std::process::exit(hardy_sep::cli::main_with_args(std::env::args_os()));
}
