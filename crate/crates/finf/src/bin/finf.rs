fn main() {
    std::process::exit(finf::cli::main_with_args(std::env::args_os()));
}
