fn main() {
    std::process::exit(mueller_cone::cli::run());
}
