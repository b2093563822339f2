fn main() {
    std::process::exit(conformal_cli::run());
}
