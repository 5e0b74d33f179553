fn main() {
    std::process::exit(qmetro::cli::main_with_args(std::env::args_os()));
}
