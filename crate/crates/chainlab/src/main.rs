fn main() {
    std::process::exit(chainlab::cli::run_from_env());
}
