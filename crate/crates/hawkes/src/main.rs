fn main() {
    std::process::exit(hawkes::cli::run_main());
}
