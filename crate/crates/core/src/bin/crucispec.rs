fn main() {
    std::process::exit(crucispec::cli::main_with_args(std::env::args_os()));
}
