fn main() {
    std::process::exit(nyman::cli::main_with_args(std::env::args_os()));
}
