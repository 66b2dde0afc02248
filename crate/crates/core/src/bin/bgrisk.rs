fn main() {
    std::process::exit(bgrisk::cli::main_with_args(std::env::args_os()));
}
