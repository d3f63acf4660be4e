fn main() {
    std::process::exit(ris_im::cli::main_with_args(std::env::args_os()));
}
