fn main() {
    std::process::exit(plp_blindspot::cli::run(std::env::args_os()));
}
