fn main() {
    std::process::exit(disordered_tasep::cli::main_with(std::env::args_os()));
}
