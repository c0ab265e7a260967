fn main() {
    std::process::exit(hermite_regret::cli::run());
}
