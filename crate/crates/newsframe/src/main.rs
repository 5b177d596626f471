fn main() {
    std::process::exit(newsframe::cli::main_with_args(std::env::args_os()));
}
