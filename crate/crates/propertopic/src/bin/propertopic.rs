fn main() {
    std::process::exit(propertopic::cli::main_with(std::env::args_os()));
}
