fn main() {
    std::process::exit(erode::cli::run());
}
