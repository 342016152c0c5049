fn main() {
    std::process::exit(arboreal::cli::run(std::env::args_os()));
}
