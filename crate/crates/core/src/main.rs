fn main() {
    std::process::exit(datatt::cli::main_with_args(std::env::args_os()));
}
