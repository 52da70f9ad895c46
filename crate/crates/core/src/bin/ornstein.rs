fn main() {
    std::process::exit(ornstein::cli::run());
}
