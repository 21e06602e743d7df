fn main() {
    std::process::exit(hemodyn::cli::run());
}
