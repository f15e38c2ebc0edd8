fn main() {
    std::process::exit(pooldata::cli::main_with_args(std::env::args_os()));
}
