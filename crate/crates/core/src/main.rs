fn main() {
    std::process::exit(psdapf::cli::main_with_args(std::env::args_os()));
}
