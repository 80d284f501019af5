fn main() {
    std::process::exit(ptssh_cli::run_main(std::env::args_os()));
}
