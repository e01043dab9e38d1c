fn main() {
    std::process::exit(dewitt::cli::run());
}
