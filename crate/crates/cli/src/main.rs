fn main() {
    std::process::exit(fss_cli::run_cli(std::env::args_os()));
}
