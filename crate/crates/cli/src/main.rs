fn main() {
    std::process::exit(devbound_cli::main_with_args(std::env::args_os()));
}
