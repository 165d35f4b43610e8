fn main() {
    std::process::exit(bmo_corona::cli::main_with_args(std::env::args_os()));
}
