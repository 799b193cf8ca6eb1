fn main() {
    std::process::exit(raretype::cli::run());
}
