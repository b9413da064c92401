fn main() {
    std::process::exit(unisim::cli::cli_main(std::env::args_os()));
}
