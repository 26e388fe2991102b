fn main() {
    std::process::exit(overconvergent::cli::main_with_args(std::env::args_os()));
}
