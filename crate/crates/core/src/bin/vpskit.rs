fn main() {
    std::process::exit(vpskit::cli::main_with_args(std::env::args_os()));
}
