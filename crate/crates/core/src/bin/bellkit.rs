fn main() {
    std::process::exit(bellkit::cli::main());
}
