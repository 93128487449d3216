fn main() {
    std::process::exit(potentiality::cli::run(std::env::args_os()));
}
