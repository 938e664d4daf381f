fn main() {
    std::process::exit(bellcert::cli::run());
}
