fn main() {
    std::process::exit(qcrb_locc::cli::cli_main());
}
