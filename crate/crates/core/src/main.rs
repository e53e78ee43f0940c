fn main() {
    std::process::exit(etaq::cli::run());
}
